#include "pulsegabor/microcircuit.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace pulsegabor {

std::size_t PulseTrain::count(Tick first, Tick last) const {
    const auto lo = std::lower_bound(pulses.begin(), pulses.end(), first);
    const auto hi = std::lower_bound(pulses.begin(), pulses.end(), last);
    return hi > lo ? static_cast<std::size_t>(hi - lo) : 0;
}

double PulseTrain::rate(Tick first, Tick last) const {
    if (last <= first) return 0.0;
    return static_cast<double>(count(first, last)) / (static_cast<double>(last - first) * dt);
}

std::vector<std::uint8_t> PulseTrain::indicator() const {
    std::vector<std::uint8_t> out(static_cast<std::size_t>(length), 0);
    for (Tick t : pulses) out[static_cast<std::size_t>(t)] = 1;
    return out;
}

PulseTrain regular_train(double rate, double dt, Tick length, double phase) {
    if (!(rate >= 0.0) || !std::isfinite(rate)) throw ConfigError("regular_train: rate must be >= 0");
    if (rate * dt > 1.0) throw ConfigError("regular_train: rate exceeds one pulse per tick");
    PulseTrain train{dt, length, {}};
    if (rate == 0.0) return train;
    auto cycles = [&](Tick t) { return std::floor(rate * static_cast<double>(t) * dt + phase + 1e-9); };
    double prev = cycles(0);
    for (Tick t = 1; t < length; ++t) {
        const double c = cycles(t);
        if (c > prev) train.pulses.push_back(t);
        prev = c;
    }
    return train;
}

PulseTrain delayed(const PulseTrain& train, Tick ticks) {
    PulseTrain out{train.dt, train.length, {}};
    for (Tick t : train.pulses)
        if (t + ticks >= 0 && t + ticks < train.length) out.pulses.push_back(t + ticks);
    return out;
}

MicrocircuitHandle add_microcircuit(Network& network, const PlasticityParams& params) {
    params.validate();
    MicrocircuitHandle h;
    h.n1 = network.add_neurons(4);
    h.n2 = h.n1 + 1;
    h.n3 = h.n1 + 2;
    h.n4 = h.n1 + 3;

    // W32 precedes W31 so a coincident 2/1 pair resolves as "2 then 1".
    SynapseSpec s;
    s.pre = h.n2;
    s.post = h.n3;
    s.rule = SynapseRule::membrane;
    s.weight = params.initial_w32;
    s.membrane = params.w32;
    h.w32 = network.add_synapse(s);

    s.pre = h.n1;
    s.weight = params.initial_w31;
    s.membrane = params.w31;
    h.w31 = network.add_synapse(s);

    s = {};
    s.pre = h.n1;
    s.post = h.n4;
    s.rule = SynapseRule::dendrite;
    s.weight = params.w41.w_inf;
    s.lag = dendritic_lag;
    s.dendrite = params.w41;
    h.w41 = network.add_synapse(s);

    s = {};
    s.pre = h.n2;
    s.post = h.n4;
    s.rule = SynapseRule::gate;
    s.weight = params.w42;
    s.lag = dendritic_lag;
    s.gated = h.w41;
    h.w42 = network.add_synapse(s);

    s.pre = h.n3;
    s.weight = params.w43;
    s.lag = 0;
    h.w43 = network.add_synapse(s);
    return h;
}

Microcircuit build_microcircuit(const PlasticityParams& params, const SimConfig& sim) {
    Microcircuit mc{Network(sim), {}};
    mc.ids = add_microcircuit(mc.network, params);
    return mc;
}

CorrelationStats correlation(const PulseTrain& train1, const PulseTrain& train3, double t0, double t1) {
    if (!(t1 > t0)) throw ConfigError("correlation: t1 must exceed t0");
    const double dt = train1.dt;
    const auto first = static_cast<Tick>(std::llround(t0 / dt));
    const auto last = static_cast<Tick>(std::llround(t1 / dt));
    const double span = t1 - t0;

    std::size_t both = 0;
    auto it = std::lower_bound(train3.pulses.begin(), train3.pulses.end(), first);
    for (auto p = std::lower_bound(train1.pulses.begin(), train1.pulses.end(), first);
         p != train1.pulses.end() && *p < last; ++p) {
        while (it != train3.pulses.end() && *it < *p) ++it;
        if (it != train3.pulses.end() && *it == *p) ++both;
    }
    const std::size_t ones = train1.count(first, last);

    CorrelationStats st;
    st.c13 = static_cast<double>(both) * dt / span;
    st.c11 = static_cast<double>(ones) * dt / span;
    st.c13_norm = ones == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(ones);
    st.d13_norm = 1.0 - st.c13_norm;
    st.rate_1 = static_cast<double>(ones) / span;
    return st;
}

SubtractorRun simulate_subtractor(double r1, double r2, double duration, const PlasticityParams& params,
                                  const SimConfig& sim) {
    SimConfig cfg = sim;
    cfg.duration = duration;
    cfg.validate();
    if (r1 * cfg.dt > 1.0 || r2 * cfg.dt > 1.0)
        throw ConfigError("run_subtractor: input rate exceeds 1/dt");
    const Tick n = cfg.ticks();
    const PulseTrain in1 = regular_train(r1, cfg.dt, n, 0.0);
    const PulseTrain in2 = regular_train(r2, cfg.dt, n, 0.5);

    Microcircuit mc = build_microcircuit(params, cfg);
    const auto& ids = mc.ids;
    SubtractorRun run;
    for (PulseTrain* tr : {&run.train1, &run.train2, &run.train3, &run.train4}) *tr = {cfg.dt, n, {}};

    auto next1 = in1.pulses.begin();
    auto next2 = in2.pulses.begin();
    for (Tick t = 0; t < n; ++t) {
        run_step(mc.network, t);
        if (mc.network.fired(ids.n1)) run.train1.pulses.push_back(t);
        if (mc.network.fired(ids.n2)) run.train2.pulses.push_back(t);
        if (mc.network.fired(ids.n3)) run.train3.pulses.push_back(t);
        if (mc.network.fired(ids.n4)) run.train4.pulses.push_back(t);
        // Input pulse at tick t makes the input neuron fire at t + 1.
        if (next1 != in1.pulses.end() && *next1 == t) {
            mc.network.inject(ids.n1, cfg.theta);
            ++next1;
        }
        if (next2 != in2.pulses.end() && *next2 == t) {
            mc.network.inject(ids.n2, cfg.theta);
            ++next2;
        }
    }

    const double t0 = static_cast<double>(n / 2) * cfg.dt;
    const double t1 = static_cast<double>(n) * cfg.dt;
    if (n < 2) {
        run.stats = {};
        return run;
    }
    run.stats = correlation(delayed(run.train1, dendritic_lag), run.train3, t0, t1);
    const Tick first = n / 2;
    run.stats.rate_1 = run.train1.rate(first, n);
    run.stats.rate_2 = run.train2.rate(first, n);
    run.stats.rate_4 = run.train4.rate(first, n);
    return run;
}

CorrelationStats run_subtractor(double r1, double r2, double duration, const PlasticityParams& params,
                                const SimConfig& sim) {
    return simulate_subtractor(r1, r2, duration, params, sim).stats;
}

std::vector<SweepRow> sweep_subtractor(double r1, const std::vector<double>& r2_values, double duration,
                                       const PlasticityParams& params, const SimConfig& sim) {
    std::vector<SweepRow> rows;
    rows.reserve(r2_values.size());
    for (double r2 : r2_values) {
        SweepRow row{r1, r2, run_subtractor(r1, r2, duration, params, sim), std::max(r1 - r2, 0.0)};
        rows.push_back(row);
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "r1,r2,rate_4,c13_norm,d13_norm,oracle\n";
    char line[256];
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%.6g,%.6g,%.6g,%.6f,%.6f,%.6g\n", r.r1, r.r2, r.stats.rate_4,
                      r.stats.c13_norm, r.stats.d13_norm, r.oracle);
        out << line;
    }
}

}  // namespace pulsegabor
