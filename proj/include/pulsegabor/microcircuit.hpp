#pragma once

#include "pulsegabor/kernel.hpp"
#include "pulsegabor/plasticity.hpp"

#include <iosfwd>
#include <vector>

namespace pulsegabor {

// Pulse ticks of one source, strictly increasing, inside [0, length).
struct PulseTrain {
    double dt = 0.001;
    Tick length = 0;
    std::vector<Tick> pulses;

    // Pulses with tick in [first, last).
    std::size_t count(Tick first, Tick last) const;
    double rate(Tick first, Tick last) const;
    std::vector<std::uint8_t> indicator() const;
};

// Evenly spaced pulses at `rate` per unit time. `phase` in [0, 1) shifts the
// train by that fraction of a period; phase 0 puts the first pulse one
// period in.
PulseTrain regular_train(double rate, double dt, Tick length, double phase = 0.0);

// Train shifted later by `ticks`; pulses pushed past the end are dropped.
PulseTrain delayed(const PulseTrain& train, Tick ticks);

// Neuron and synapse ids of one circuit inside a Network.
struct MicrocircuitHandle {
    NeuronId n1 = 0, n2 = 0, n3 = 0, n4 = 0;
    SynapseId w31 = 0, w32 = 0, w41 = 0, w42 = 0, w43 = 0;

    NeuronId input_plus() const noexcept { return n1; }
    NeuronId input_minus() const noexcept { return n2; }
    NeuronId output() const noexcept { return n4; }
};

// Ticks between a neuron-1 pulse and its arrival at W41 / the W42 gate.
inline constexpr unsigned dendritic_lag = 1;

// Wires the four-neuron correlator into `network`:
//   1 -> 3 (W31), 2 -> 3 (W32), 1 -> 4 (W41), 2 -> 4 gate (W42), 3 -> 4 gate (W43).
MicrocircuitHandle add_microcircuit(Network& network, const PlasticityParams& params);

struct Microcircuit {
    Network network;
    MicrocircuitHandle ids;
};

Microcircuit build_microcircuit(const PlasticityParams& params, const SimConfig& sim = {});

struct CorrelationStats {
    double c13 = 0.0;
    double c11 = 0.0;
    double c13_norm = 0.0;
    double d13_norm = 1.0;
    double rate_1 = 0.0;
    double rate_2 = 0.0;
    double rate_4 = 0.0;
};

// Discrete coincidence measure over [t0, t1) in time units. Fills c13, c11,
// the normalized pair and rate_1; the remaining rates are left at zero.
CorrelationStats correlation(const PulseTrain& train1, const PulseTrain& train3, double t0, double t1);

struct SubtractorRun {
    CorrelationStats stats;
    PulseTrain train1, train2, train3, train4;
};

// Drives a fresh circuit with regular trains (train 2 half a period behind
// train 1) and measures the second half of the run.
SubtractorRun simulate_subtractor(double r1, double r2, double duration, const PlasticityParams& params,
                                  const SimConfig& sim = {});

CorrelationStats run_subtractor(double r1, double r2, double duration, const PlasticityParams& params,
                                const SimConfig& sim = {});

struct SweepRow {
    double r1 = 0.0;
    double r2 = 0.0;
    CorrelationStats stats;
    double oracle = 0.0;
};

std::vector<SweepRow> sweep_subtractor(double r1, const std::vector<double>& r2_values, double duration,
                                       const PlasticityParams& params, const SimConfig& sim = {});

// Columns: r1, r2, rate_4, c13_norm, d13_norm, oracle.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace pulsegabor
