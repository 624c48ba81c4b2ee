#pragma once

namespace pulsegabor {

// Hebbian membrane adaptation:
//   dW/dt = -gamma * W + mu * (a_post - theta / 2) * chi(pre)
// mu is signed per synapse: positive for the neuron-1 input of the
// correlator, negative for the neuron-2 input.
struct MembraneRuleParams {
    double gamma = 0.01;
    double mu = 2500.0;
    double theta = 1.0;
    double w_max = 0.75;

    void validate() const;
};

// Dendritic gating:
//   dW/dt = -gamma_d * (W - w_inf) + mu_d * (gate_drive - i_theta) * W * chi(x1)
// where gate_drive sums the weights of gating pulses present further up the
// dendrite (X3 * W43 + X2 * W42 in the microcircuit).
struct DendriteRuleParams {
    double gamma_d = 500.0;
    double mu_d = -20000.0;
    double w_inf = 1.0;
    double i_theta = 0.02;
    double w_max = 2.0;

    void validate() const;
};

// One forward-Euler step, clamped to [0, p.w_max].
double membrane_update(double w, double a_post, bool pre_fired, const MembraneRuleParams& p, double dt);

double dendrite_update(double w, bool x1, double gate_drive, const DendriteRuleParams& p, double dt);

double dendrite_update(double w41, bool x1, bool x2, bool x3, double w42, double w43,
                       const DendriteRuleParams& p, double dt);

// Full parameter block of the four-neuron correlator circuit.
struct PlasticityParams {
    MembraneRuleParams w31{};
    MembraneRuleParams w32{.gamma = 0.01, .mu = -4000.0, .theta = 1.0, .w_max = 0.75};
    DendriteRuleParams w41{};
    double w42 = 1.0;
    double w43 = 1.0;
    double initial_w31 = 0.5;
    double initial_w32 = 0.5;
    // Upper bound for fixed (non-adaptive) synapses.
    double fixed_w_max = 2.0;

    void validate() const;
};

// Calibrated defaults scaled to a firing threshold theta.
PlasticityParams default_plasticity(double theta = 1.0);

}  // namespace pulsegabor
