#include "pulsegabor/kernel.hpp"

#include <cmath>
#include <string>

namespace pulsegabor {

void SimConfig::validate() const {
    if (!(std::isfinite(dt) && dt > 0.0)) throw ConfigError("sim: dt must be > 0");
    if (!(std::isfinite(duration) && duration >= 0.0)) throw ConfigError("sim: duration must be >= 0");
    if (!(std::isfinite(theta) && theta > 0.0)) throw ConfigError("sim: theta must be > 0");
}

Tick SimConfig::ticks() const {
    return static_cast<Tick>(std::llround(duration / dt));
}

IafResult iaf_step(NeuronState state, double charge, double theta) {
    if (!(charge >= 0.0)) throw std::invalid_argument("iaf_step: negative charge " + std::to_string(charge));
    state.accumulator += charge;
    if (state.accumulator >= theta) {
        state.accumulator = 0.0;
        state.fired_this_step = true;
    } else {
        state.fired_this_step = false;
    }
    return {state, state.fired_this_step};
}

Network::Network(SimConfig config) : config_(config) {
    config_.validate();
}

NeuronId Network::add_neuron() {
    return add_neurons(1);
}

NeuronId Network::add_neurons(std::size_t count) {
    const auto first = static_cast<NeuronId>(accumulator_.size());
    accumulator_.resize(accumulator_.size() + count, 0.0);
    pending_.resize(accumulator_.size(), 0.0);
    fired_.resize(accumulator_.size(), 0);
    history_.resize(accumulator_.size(), 0);
    return first;
}

std::size_t Network::check_neuron(NeuronId id) const {
    if (id >= accumulator_.size())
        throw ConfigError("network: neuron " + std::to_string(id) + " does not exist");
    return id;
}

SynapseId Network::add_synapse(const SynapseSpec& spec) {
    check_neuron(spec.pre);
    check_neuron(spec.post);
    if (spec.lag > max_lag) throw ConfigError("network: synapse lag exceeds " + std::to_string(max_lag));
    if (!(std::isfinite(spec.weight) && spec.weight >= 0.0))
        throw ConfigError("network: synapse weight must be finite and >= 0");

    Synapse s{spec.pre, spec.post, 0, spec.weight, spec.rule, static_cast<std::uint8_t>(spec.lag), 0};
    switch (spec.rule) {
    case SynapseRule::fixed:
        break;
    case SynapseRule::membrane:
        spec.membrane.validate();
        if (spec.weight > spec.membrane.w_max) throw ConfigError("network: membrane weight above w_max");
        s.params = static_cast<std::uint16_t>(membrane_params_.size());
        membrane_params_.push_back(spec.membrane);
        break;
    case SynapseRule::dendrite:
        spec.dendrite.validate();
        if (spec.weight > spec.dendrite.w_max) throw ConfigError("network: dendrite weight above w_max");
        s.params = static_cast<std::uint16_t>(dendrite_params_.size());
        dendrite_params_.push_back(spec.dendrite);
        break;
    case SynapseRule::gate:
        if (spec.gated >= synapses_.size() || synapses_[spec.gated].rule != SynapseRule::dendrite)
            throw ConfigError("network: gate must target an existing dendrite synapse");
        if (synapses_[spec.gated].post != spec.post)
            throw ConfigError("network: gate and gated synapse must share the postsynaptic neuron");
        s.gated = spec.gated;
        gates_dirty_ = true;
        break;
    }
    // Parameter sets are shared; collapse duplicates so the table stays small.
    if (spec.rule == SynapseRule::membrane) {
        for (std::size_t i = 0; i + 1 < membrane_params_.size(); ++i) {
            const auto& a = membrane_params_[i];
            const auto& b = membrane_params_.back();
            if (a.gamma == b.gamma && a.mu == b.mu && a.theta == b.theta && a.w_max == b.w_max) {
                membrane_params_.pop_back();
                s.params = static_cast<std::uint16_t>(i);
                break;
            }
        }
    } else if (spec.rule == SynapseRule::dendrite) {
        for (std::size_t i = 0; i + 1 < dendrite_params_.size(); ++i) {
            const auto& a = dendrite_params_[i];
            const auto& b = dendrite_params_.back();
            if (a.gamma_d == b.gamma_d && a.mu_d == b.mu_d && a.w_inf == b.w_inf && a.i_theta == b.i_theta &&
                a.w_max == b.w_max) {
                dendrite_params_.pop_back();
                s.params = static_cast<std::uint16_t>(i);
                break;
            }
        }
        gates_dirty_ = true;
    }
    if (membrane_params_.size() > 0xFFFF || dendrite_params_.size() > 0xFFFF)
        throw ConfigError("network: too many distinct rule parameter sets");

    synapses_.push_back(s);
    return static_cast<SynapseId>(synapses_.size() - 1);
}

void Network::inject(NeuronId neuron, double charge) {
    check_neuron(neuron);
    if (!(charge >= 0.0)) throw std::invalid_argument("network: injected charge must be >= 0");
    pending_[neuron] += charge;
}

NeuronState Network::neuron(NeuronId id) const {
    check_neuron(id);
    return {accumulator_[id], fired_[id] != 0};
}

double Network::weight(SynapseId id) const {
    if (id >= synapses_.size()) throw ConfigError("network: synapse " + std::to_string(id) + " does not exist");
    return synapses_[id].weight;
}

SynapseRule Network::rule(SynapseId id) const {
    if (id >= synapses_.size()) throw ConfigError("network: synapse " + std::to_string(id) + " does not exist");
    return synapses_[id].rule;
}

bool Network::arrived(NeuronId pre, unsigned lag) const noexcept {
    return (history_[pre] >> lag) & 1U;
}

void Network::rebuild_gates() {
    dendrite_ids_.clear();
    std::vector<std::uint32_t> index_of(synapses_.size(), 0);
    for (SynapseId i = 0; i < synapses_.size(); ++i) {
        if (synapses_[i].rule == SynapseRule::dendrite) {
            index_of[i] = static_cast<std::uint32_t>(dendrite_ids_.size());
            dendrite_ids_.push_back(i);
        }
    }
    gate_offsets_.assign(dendrite_ids_.size() + 1, 0);
    for (const auto& s : synapses_)
        if (s.rule == SynapseRule::gate) ++gate_offsets_[index_of[s.gated] + 1];
    for (std::size_t i = 1; i < gate_offsets_.size(); ++i) gate_offsets_[i] += gate_offsets_[i - 1];
    gate_ids_.assign(gate_offsets_.back(), 0);
    std::vector<std::uint32_t> fill(gate_offsets_.begin(), gate_offsets_.end() - 1);
    for (SynapseId i = 0; i < synapses_.size(); ++i)
        if (synapses_[i].rule == SynapseRule::gate) gate_ids_[fill[index_of[synapses_[i].gated]]++] = i;
    gates_dirty_ = false;
}

void Network::step() {
    if (gates_dirty_) rebuild_gates();
    const double theta = config_.theta;
    const double dt = config_.dt;

    // Phase 1: resolve spikes from the charge delivered last tick.
    for (std::size_t i = 0; i < accumulator_.size(); ++i) {
        const IafResult r = iaf_step({accumulator_[i], false}, pending_[i], theta);
        accumulator_[i] = r.state.accumulator;
        fired_[i] = r.fired ? 1 : 0;
        history_[i] = static_cast<std::uint8_t>((history_[i] << 1) | fired_[i]);
        pending_[i] = 0.0;
    }

    // Phase 2: dendritic gating acts before any charge is delivered.
    for (std::size_t d = 0; d < dendrite_ids_.size(); ++d) {
        Synapse& s = synapses_[dendrite_ids_[d]];
        const bool x1 = arrived(s.pre, s.lag);
        double drive = 0.0;
        if (x1) {
            for (auto g = gate_offsets_[d]; g < gate_offsets_[d + 1]; ++g) {
                const Synapse& gate = synapses_[gate_ids_[g]];
                if (arrived(gate.pre, gate.lag)) drive += gate.weight;
            }
        }
        s.weight = dendrite_update(s.weight, x1, drive, dendrite_params_[s.params], dt);
    }

    // Phase 3: membrane adaptation and charge delivery, in synapse order.
    for (Synapse& s : synapses_) {
        switch (s.rule) {
        case SynapseRule::gate:
            break;
        case SynapseRule::membrane: {
            const bool pre = arrived(s.pre, s.lag);
            const double a_post = accumulator_[s.post] + pending_[s.post];
            s.weight = membrane_update(s.weight, a_post, pre, membrane_params_[s.params], dt);
            if (pre) pending_[s.post] += s.weight;
            break;
        }
        case SynapseRule::fixed:
        case SynapseRule::dendrite:
            if (arrived(s.pre, s.lag)) pending_[s.post] += s.weight;
            break;
        }
    }
    ++tick_;
}

void run_step(Network& network, Tick t) {
    if (t != network.tick())
        throw ConfigError("run_step: expected tick " + std::to_string(network.tick()) + ", got " + std::to_string(t));
    network.step();
}

}  // namespace pulsegabor
