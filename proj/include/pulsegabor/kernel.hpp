#pragma once

#include "pulsegabor/plasticity.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace pulsegabor {

using Tick = std::int64_t;
using NeuronId = std::uint32_t;
using SynapseId = std::uint32_t;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SimConfig {
    double dt = 0.001;
    double duration = 1.0;
    std::uint64_t seed = 1;
    double theta = 1.0;

    void validate() const;
    // Number of ticks covering `duration`.
    Tick ticks() const;
};

struct NeuronState {
    double accumulator = 0.0;
    bool fired_this_step = false;
};

struct IafResult {
    NeuronState state;
    bool fired = false;
};

// Non-leaky integrate-and-fire step. Reaching theta emits a pulse and resets
// the accumulator to zero; overshoot is discarded.
IafResult iaf_step(NeuronState state, double charge, double theta);

enum class SynapseRule : std::uint8_t {
    fixed,     // constant weight, carries charge
    membrane,  // Hebbian membrane adaptation, carries charge
    dendrite,  // gated by pulses further up the dendrite, carries charge
    gate,      // feeds a dendrite synapse's gating drive, never carries charge
};

struct SynapseSpec {
    NeuronId pre = 0;
    NeuronId post = 0;
    SynapseRule rule = SynapseRule::fixed;
    double weight = 0.0;
    // Dendritic transit: ticks between the presynaptic pulse and its arrival
    // at this synapse. Charge always lands in the accumulator one tick after
    // arrival, so even lag 0 keeps the unit delay.
    unsigned lag = 0;
    MembraneRuleParams membrane{};
    DendriteRuleParams dendrite{};
    // gate only: the dendrite synapse whose drive this synapse feeds.
    SynapseId gated = 0;
};

// Deterministic fixed-timestep network. Each run_step executes:
//   1. every neuron integrates the charge delivered last tick (iaf_step);
//   2. dendrite synapses adapt to the pulses arriving this tick;
//   3. charge synapses, in ascending id order, adapt (membrane rule) and
//      deliver weight * pulse into next tick's pending charge. A membrane
//      synapse sees the accumulator plus charge already delivered this tick.
class Network {
public:
    static constexpr unsigned max_lag = 7;

    explicit Network(SimConfig config = {});

    NeuronId add_neuron();
    NeuronId add_neurons(std::size_t count);  // returns the first id
    SynapseId add_synapse(const SynapseSpec& spec);

    // Adds external charge for next tick (AER deliveries, test stimuli).
    void inject(NeuronId neuron, double charge);

    void step();
    Tick tick() const noexcept { return tick_; }  // next tick to execute

    std::size_t neuron_count() const noexcept { return accumulator_.size(); }
    std::size_t synapse_count() const noexcept { return synapses_.size(); }

    NeuronState neuron(NeuronId id) const;
    bool fired(NeuronId id) const { return fired_[check_neuron(id)] != 0; }
    double pending_charge(NeuronId id) const { return pending_[check_neuron(id)]; }
    double weight(SynapseId id) const;
    SynapseRule rule(SynapseId id) const;

    std::span<const std::uint8_t> fired_flags() const noexcept { return fired_; }
    std::span<const double> accumulators() const noexcept { return accumulator_; }
    const SimConfig& config() const noexcept { return config_; }

private:
    struct Synapse {
        NeuronId pre;
        NeuronId post;
        SynapseId gated;
        double weight;
        SynapseRule rule;
        std::uint8_t lag;
        std::uint16_t params;
    };

    std::size_t check_neuron(NeuronId id) const;
    bool arrived(NeuronId pre, unsigned lag) const noexcept;
    void rebuild_gates();

    SimConfig config_;
    Tick tick_ = 0;
    std::vector<double> accumulator_;
    std::vector<double> pending_;
    std::vector<std::uint8_t> fired_;
    // Bit k set: the neuron fired k ticks before the tick being executed.
    std::vector<std::uint8_t> history_;
    std::vector<Synapse> synapses_;
    std::vector<MembraneRuleParams> membrane_params_;
    std::vector<DendriteRuleParams> dendrite_params_;

    std::vector<SynapseId> dendrite_ids_;
    std::vector<std::uint32_t> gate_offsets_;
    std::vector<SynapseId> gate_ids_;
    bool gates_dirty_ = false;
};

// Executes tick t; t must equal network.tick().
void run_step(Network& network, Tick t);

}  // namespace pulsegabor
