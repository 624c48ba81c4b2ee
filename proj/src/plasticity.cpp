#include "pulsegabor/plasticity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pulsegabor {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void MembraneRuleParams::validate() const {
    require(std::isfinite(gamma) && gamma >= 0.0, "membrane rule: gamma must be >= 0");
    require(std::isfinite(mu), "membrane rule: mu must be finite");
    require(std::isfinite(theta) && theta > 0.0, "membrane rule: theta must be > 0");
    require(std::isfinite(w_max) && w_max > 0.0, "membrane rule: w_max must be > 0");
}

void DendriteRuleParams::validate() const {
    require(std::isfinite(gamma_d) && gamma_d >= 0.0, "dendrite rule: gamma_d must be >= 0");
    require(std::isfinite(mu_d) && mu_d < 0.0, "dendrite rule: mu_d must be < 0");
    require(std::isfinite(w_inf) && w_inf > 0.0, "dendrite rule: w_inf must be > 0");
    require(std::isfinite(i_theta) && i_theta > 0.0, "dendrite rule: i_theta must be > 0");
    require(std::isfinite(w_max) && w_max >= w_inf, "dendrite rule: w_max must be >= w_inf");
}

double membrane_update(double w, double a_post, bool pre_fired, const MembraneRuleParams& p, double dt) {
    double drift = -p.gamma * w;
    if (pre_fired) drift += p.mu * (a_post - p.theta / 2.0);
    return std::clamp(w + dt * drift, 0.0, p.w_max);
}

double dendrite_update(double w, bool x1, double gate_drive, const DendriteRuleParams& p, double dt) {
    double drift = -p.gamma_d * (w - p.w_inf);
    if (x1) drift += p.mu_d * (gate_drive - p.i_theta) * w;
    return std::clamp(w + dt * drift, 0.0, p.w_max);
}

double dendrite_update(double w41, bool x1, bool x2, bool x3, double w42, double w43,
                       const DendriteRuleParams& p, double dt) {
    const double drive = (x3 ? w43 : 0.0) + (x2 ? w42 : 0.0);
    return dendrite_update(w41, x1, drive, p, dt);
}

void PlasticityParams::validate() const {
    w31.validate();
    w32.validate();
    w41.validate();
    require(w31.mu > 0.0, "plasticity: mu_31 must be positive");
    require(w32.mu < 0.0, "plasticity: mu_32 must be negative");
    require(w42 >= 0.0 && w43 >= 0.0, "plasticity: gate weights must be >= 0");
    require(initial_w31 >= 0.0 && initial_w31 <= w31.w_max, "plasticity: initial W31 out of range");
    require(initial_w32 >= 0.0 && initial_w32 <= w32.w_max, "plasticity: initial W32 out of range");
    require(fixed_w_max > 0.0, "plasticity: fixed_w_max must be > 0");
}

PlasticityParams default_plasticity(double theta) {
    PlasticityParams p;
    p.w31 = {.gamma = 0.01, .mu = 2500.0, .theta = theta, .w_max = 0.75 * theta};
    p.w32 = {.gamma = 0.01, .mu = -4000.0, .theta = theta, .w_max = 0.75 * theta};
    p.w41 = {.gamma_d = 500.0, .mu_d = -20000.0 / theta, .w_inf = theta, .i_theta = 0.02 * theta, .w_max = 2.0 * theta};
    p.w42 = theta;
    p.w43 = theta;
    p.initial_w31 = theta / 2.0;
    p.initial_w32 = theta / 2.0;
    p.fixed_w_max = 2.0 * theta;
    return p;
}

}  // namespace pulsegabor
