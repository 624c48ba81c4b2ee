#include "pulsegabor/filters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace pulsegabor {

// ---------------------------------------------------------------------------
// Masks

IntegerMask::IntegerMask(Grid<int> c) : coeffs(std::move(c)), anchor_x(coeffs.width() / 2), anchor_y(coeffs.height() / 2) {}

IntegerMask::IntegerMask(Grid<int> c, std::size_t ax, std::size_t ay) : coeffs(std::move(c)), anchor_x(ax), anchor_y(ay) {
    if (!coeffs.empty() && (ax >= coeffs.width() || ay >= coeffs.height()))
        throw ConfigError("mask: anchor outside the mask");
}

IntegerMask IntegerMask::row(std::vector<int> values) {
    const std::size_t n = values.size();
    return IntegerMask(Grid<int>(n, 1, std::move(values)));
}

long long IntegerMask::sum() const {
    long long s = 0;
    for (int v : coeffs.values()) s += v;
    return s;
}

void IntegerMask::require_zero_sum() const {
    if (coeffs.empty()) throw ConfigError("mask: empty");
    const long long s = sum();
    if (s != 0) throw ConfigError("mask: coefficients sum to " + std::to_string(s) + ", expected 0");
}

nlohmann::json IntegerMask::to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t y = 0; y < coeffs.height(); ++y) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t x = 0; x < coeffs.width(); ++x) row.push_back(coeffs(x, y));
        rows.push_back(row);
    }
    return {{"coefficients", rows}, {"anchor", {anchor_x, anchor_y}}};
}

IntegerMask IntegerMask::from_json(const nlohmann::json& j) {
    try {
        const auto& rows = j.at("coefficients");
        if (!rows.is_array() || rows.empty()) throw ConfigError("mask: coefficients must be a non-empty array");
        std::vector<int> values;
        std::size_t width = 0;
        if (!rows.front().is_array()) {
            for (const auto& v : rows) values.push_back(v.get<int>());
            width = values.size();
        } else {
            width = rows.front().size();
            for (const auto& row : rows) {
                if (!row.is_array() || row.size() != width) throw ConfigError("mask: rows must have equal length");
                for (const auto& v : row) values.push_back(v.get<int>());
            }
        }
        if (width == 0) throw ConfigError("mask: empty rows");
        const std::size_t height = values.size() / width;
        Grid<int> grid(width, height, std::move(values));
        if (j.contains("anchor")) {
            const auto& a = j.at("anchor");
            return IntegerMask(std::move(grid), a.at(0).get<std::size_t>(), a.at(1).get<std::size_t>());
        }
        return IntegerMask(std::move(grid));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("mask: malformed JSON: ") + e.what());
    }
}

MaskDecomposition MaskDecomposition::negated() const {
    MaskDecomposition d = *this;
    for (auto& p : d.pairs) std::swap(p.plus, p.minus);
    d.polarity = polarity == Polarity::positive ? Polarity::negative : Polarity::positive;
    return d;
}

MaskDecomposition decompose_mask(const IntegerMask& mask) {
    mask.require_zero_sum();
    const auto& c = mask.coeffs;
    struct Slot {
        Offset at;
        int remaining;
    };
    std::vector<Slot> negatives;
    for (std::size_t y = 0; y < c.height(); ++y)
        for (std::size_t x = 0; x < c.width(); ++x)
            if (c(x, y) < 0) negatives.push_back({{static_cast<int>(x), static_cast<int>(y)}, -c(x, y)});

    MaskDecomposition d;
    d.width = c.width();
    d.height = c.height();
    for (std::size_t y = 0; y < c.height(); ++y)
        for (std::size_t x = 0; x < c.width(); ++x)
            for (int k = 0; k < c(x, y); ++k) {
                const Offset p{static_cast<int>(x), static_cast<int>(y)};
                Slot* best = nullptr;
                long long best_d = std::numeric_limits<long long>::max();
                // negatives are in row-major order, so strict < keeps the earliest on ties
                for (auto& n : negatives) {
                    if (n.remaining == 0) continue;
                    const long long dx = n.at.x - p.x;
                    const long long dy = n.at.y - p.y;
                    const long long dist = dx * dx + dy * dy;
                    if (dist < best_d) {
                        best_d = dist;
                        best = &n;
                    }
                }
                --best->remaining;
                d.pairs.push_back({p, best->at});
            }
    return d;
}

Grid<int> reconstruct(const MaskDecomposition& d) {
    Grid<int> g(d.width, d.height, 0);
    for (const auto& p : d.pairs) {
        g(static_cast<std::size_t>(p.plus.x), static_cast<std::size_t>(p.plus.y)) += 1;
        g(static_cast<std::size_t>(p.minus.x), static_cast<std::size_t>(p.minus.y)) -= 1;
    }
    return g;
}

double static_mask_response(const MaskDecomposition& d, const RealGrid& pattern) {
    if (pattern.width() < d.width || pattern.height() < d.height)
        throw ConfigError("static_mask_response: pattern does not cover the mask");
    double sum = 0.0;
    for (const auto& p : d.pairs) {
        const double a = pattern(static_cast<std::size_t>(p.plus.x), static_cast<std::size_t>(p.plus.y));
        const double b = pattern(static_cast<std::size_t>(p.minus.x), static_cast<std::size_t>(p.minus.y));
        sum += std::max(a - b, 0.0);
    }
    return sum;
}

BankResponse static_bank_response(const IntegerMask& mask, const RealGrid& pattern) {
    const MaskDecomposition pos = decompose_mask(mask);
    BankResponse r;
    r.positive = static_mask_response(pos, pattern);
    r.negative = static_mask_response(pos.negated(), pattern);
    r.corrected = std::max(r.positive - r.negative, 0.0);
    return r;
}

Grid<long long> pair_path_response(const Grid<long long>& img, const MaskDecomposition& d) {
    if (d.width > img.width() || d.height > img.height() || d.width == 0)
        throw ConfigError("pair_path_response: mask does not fit image");
    const std::size_t ow = img.width() - d.width + 1;
    const std::size_t oh = img.height() - d.height + 1;
    Grid<long long> out(ow, oh, 0);
    for (std::size_t y = 0; y < oh; ++y)
        for (std::size_t x = 0; x < ow; ++x) {
            long long acc = 0;
            for (const auto& p : d.pairs)
                acc += img(x + static_cast<std::size_t>(p.plus.x), y + static_cast<std::size_t>(p.plus.y)) -
                       img(x + static_cast<std::size_t>(p.minus.x), y + static_cast<std::size_t>(p.minus.y));
            out(x, y) = acc;
        }
    return out;
}

IntegerMask quantize_kernel(const RealKernel& k, int max_coeff) {
    if (max_coeff < 1) throw ConfigError("quantize: max_coeff must be >= 1");
    const auto& v = k.coeffs.values();
    double peak = 0.0;
    double sum = 0.0;
    for (double x : v) {
        peak = std::max(peak, std::abs(x));
        sum += x;
    }
    if (peak == 0.0) throw ConfigError("quantize: kernel is all zero");
    const double mean = sum / static_cast<double>(v.size());

    std::vector<double> target(v.size());
    std::vector<int> q(v.size());
    long long total = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        target[i] = (v[i] - mean) * max_coeff / peak;
        q[i] = static_cast<int>(std::floor(target[i]));
        total += q[i];
    }
    // Floors undershoot by -total units; award them by largest remainder.
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return target[a] - q[a] > target[b] - q[b]; });
    for (long long i = 0; i < -total; ++i) q[order[static_cast<std::size_t>(i)]] += 1;

    IntegerMask m(Grid<int>(k.coeffs.width(), k.coeffs.height(), std::move(q)), k.anchor_x, k.anchor_y);
    m.require_zero_sum();
    return m;
}

IntegerMask default_gabor_mask(const GaborMaskParams& p) {
    return quantize_kernel(gabor_kernel(p.gabor), p.max_coeff);
}

// ---------------------------------------------------------------------------
// Pulse fabric

PulseFabric::PulseFabric(const SimConfig& sim, const PlasticityParams& plasticity, std::size_t external_sources)
    : sim_(sim), plasticity_(plasticity), external_(external_sources), network_(sim), table_(0) {
    plasticity_.validate();
    for (std::size_t a = 0; a < external_; ++a) table_.add_source(static_cast<Address>(a));
}

std::uint32_t PulseFabric::add_subtractor() {
    if (finalized_) throw ConfigError("fabric: cannot add units after the first step");
    const MicrocircuitHandle h = add_microcircuit(network_, plasticity_);
    const std::uint32_t unit = table_.add_targets(1);
    ports_.push_back({h.input_plus(), h.input_minus()});
    outputs_.push_back(h.output());
    unit_counts_.push_back(0);
    table_.add_source(address_of(unit));
    return unit;
}

std::uint32_t PulseFabric::add_summer() {
    if (finalized_) throw ConfigError("fabric: cannot add units after the first step");
    const NeuronId n = network_.add_neuron();
    const std::uint32_t unit = table_.add_targets(1);
    ports_.push_back({n, n});
    outputs_.push_back(n);
    unit_counts_.push_back(0);
    table_.add_source(address_of(unit));
    return unit;
}

void PulseFabric::connect(Address source, std::uint32_t unit, Port port, double weight) {
    if (finalized_) throw ConfigError("fabric: cannot add routes after the first step");
    if (port == Port::gate) throw ConfigError("fabric: units expose only plus and minus ports");
    if (!table_.has_source(source)) throw ConfigError("fabric: unknown source address " + std::to_string(source));
    table_.connect(source, unit, port, weight);
}

void PulseFabric::finalize() {
    const std::size_t sources = external_ + outputs_.size();
    route_offsets_.assign(sources + 1, 0);
    for (std::size_t a = 0; a < sources; ++a) {
        const auto targets = table_.targets(static_cast<Address>(a));
        route_offsets_[a + 1] = route_offsets_[a] + static_cast<std::uint32_t>(targets.size());
        for (const auto& t : targets) {
            const Ports& p = ports_[t.target];
            route_neuron_.push_back(t.port == Port::minus ? p.minus : p.plus);
            route_charge_.push_back(sim_.theta * t.weight);
        }
    }
    finalized_ = true;
}

void PulseFabric::step(std::span<const Address> external_fired) {
    if (!finalized_) finalize();
    network_.step();

    const auto fired = network_.fired_flags();
    fired_units_.clear();
    for (std::uint32_t u = 0; u < outputs_.size(); ++u) {
        if (fired[outputs_[u]]) {
            fired_units_.push_back(u);
            ++unit_counts_[u];
        }
    }
    // Same order route() normalizes to: external sources first, ascending.
    auto deliver = [&](std::size_t address) {
        for (auto i = route_offsets_[address]; i < route_offsets_[address + 1]; ++i)
            network_.inject(route_neuron_[i], route_charge_[i]);
    };
    Address last = 0;
    bool first = true;
    for (Address a : external_fired) {
        if (a >= external_) throw ConfigError("fabric: external address " + std::to_string(a) + " out of range");
        if (!first && a <= last) throw ConfigError("fabric: external events must be ascending and unique");
        deliver(a);
        last = a;
        first = false;
    }
    for (std::uint32_t u : fired_units_) deliver(external_ + u);
}

AbsPoolUnits add_abs_pool(PulseFabric& fabric, Address r_plus, Address r_minus) {
    AbsPoolUnits u;
    u.forward = fabric.add_subtractor();
    u.backward = fabric.add_subtractor();
    u.sum = fabric.add_summer();
    fabric.connect(r_plus, u.forward, Port::plus);
    fabric.connect(r_minus, u.forward, Port::minus);
    fabric.connect(r_minus, u.backward, Port::plus);
    fabric.connect(r_plus, u.backward, Port::minus);
    fabric.connect(fabric.address_of(u.forward), u.sum, Port::plus);
    fabric.connect(fabric.address_of(u.backward), u.sum, Port::plus);
    return u;
}

namespace {

// Steps `fabric` for `ticks` ticks with regular external trains; returns
// per-unit output counts over the second half and per-source input counts.
struct HalfCounts {
    std::vector<std::uint64_t> units;
    std::vector<std::uint64_t> inputs;
    double window = 0.0;
};

HalfCounts drive_regular(PulseFabric& fabric, const std::vector<PulseTrain>& trains, Tick ticks, double dt) {
    std::vector<std::size_t> next(trains.size(), 0);
    std::vector<std::uint64_t> inputs(trains.size(), 0);
    std::vector<std::uint64_t> at_half;
    std::vector<Address> fired;
    const Tick half = ticks / 2;
    for (Tick t = 0; t < ticks; ++t) {
        if (t == half) at_half = fabric.unit_counts();
        fired.clear();
        for (std::size_t i = 0; i < trains.size(); ++i) {
            const auto& p = trains[i].pulses;
            if (next[i] < p.size() && p[next[i]] == t) {
                fired.push_back(static_cast<Address>(i));
                ++next[i];
                if (t >= half) ++inputs[i];
            }
        }
        fabric.step(fired);
    }
    if (at_half.empty()) at_half = fabric.unit_counts();
    HalfCounts hc;
    hc.units = fabric.unit_counts();
    for (std::size_t u = 0; u < hc.units.size(); ++u) hc.units[u] -= at_half[u];
    hc.inputs = std::move(inputs);
    hc.window = static_cast<double>(ticks - half) * dt;
    return hc;
}

}  // namespace

RateMeasurement simulate_abs_pool(double r_plus, double r_minus, double duration, const FabricConfig& cfg) {
    SimConfig sim = cfg.sim;
    sim.duration = duration;
    sim.validate();
    const Tick n = sim.ticks();
    PulseFabric fabric(sim, cfg.plasticity, 2);
    const AbsPoolUnits pool = add_abs_pool(fabric, 0, 1);
    const std::vector<PulseTrain> trains{regular_train(r_plus, sim.dt, n, 0.0), regular_train(r_minus, sim.dt, n, 0.5)};
    const HalfCounts hc = drive_regular(fabric, trains, n, sim.dt);
    if (hc.window <= 0.0) return {};
    return {static_cast<double>(hc.inputs[0]) / hc.window, static_cast<double>(hc.inputs[1]) / hc.window,
            static_cast<double>(hc.units[pool.sum]) / hc.window};
}

BankResponse simulate_mask_bank(const IntegerMask& mask, const RealGrid& pattern_rates, double duration,
                                const FabricConfig& cfg) {
    const MaskDecomposition pos = decompose_mask(mask);
    const MaskDecomposition neg = pos.negated();
    if (!pattern_rates.same_shape(RealGrid(mask.coeffs.width(), mask.coeffs.height())))
        throw ConfigError("simulate_mask_bank: pattern must match the mask shape");
    SimConfig sim = cfg.sim;
    sim.duration = duration;
    sim.validate();
    const Tick n = sim.ticks();

    PulseFabric fabric(sim, cfg.plasticity, pattern_rates.size());
    auto addr = [&](Offset o) { return static_cast<Address>(static_cast<std::size_t>(o.y) * pattern_rates.width() + static_cast<std::size_t>(o.x)); };
    auto build_bank = [&](const MaskDecomposition& d) {
        const std::uint32_t sum = fabric.add_summer();
        for (const auto& p : d.pairs) {
            const std::uint32_t u = fabric.add_subtractor();
            fabric.connect(addr(p.plus), u, Port::plus);
            fabric.connect(addr(p.minus), u, Port::minus);
            fabric.connect(fabric.address_of(u), sum, Port::plus);
        }
        return sum;
    };
    const std::uint32_t sum_pos = build_bank(pos);
    const std::uint32_t sum_neg = build_bank(neg);
    const std::uint32_t corrected = fabric.add_subtractor();
    fabric.connect(fabric.address_of(sum_pos), corrected, Port::plus);
    fabric.connect(fabric.address_of(sum_neg), corrected, Port::minus);

    std::vector<PulseTrain> trains;
    // Staggered phases: equal-rate pixels in lockstep would collide in the summer.
    for (std::size_t i = 0; i < pattern_rates.size(); ++i) {
        const double phase = std::fmod(0.618033988749895 * static_cast<double>(i), 1.0);
        trains.push_back(regular_train(pattern_rates[i], sim.dt, n, phase));
    }
    const HalfCounts hc = drive_regular(fabric, trains, n, sim.dt);
    if (hc.window <= 0.0) return {};
    return {static_cast<double>(hc.units[sum_pos]) / hc.window, static_cast<double>(hc.units[sum_neg]) / hc.window,
            static_cast<double>(hc.units[corrected]) / hc.window};
}

// ---------------------------------------------------------------------------
// Edge detector

EdgeDetectorBank build_edge_detector(std::size_t window, bool pooled) {
    if (window < 2) throw ConfigError("edge detector: window must span at least 2 pixels");
    EdgeDetectorBank b;
    b.window = window;
    b.pooled = pooled;
    for (std::size_t x = 0; x + 1 < window; ++x) {
        const Offset left{static_cast<int>(x), 0};
        const Offset right{static_cast<int>(x + 1), 0};
        b.positive_pairs.push_back({left, right});
        b.negative_pairs.push_back({right, left});
    }
    return b;
}

EdgeResponse simulate_edge_detector(const EdgeDetectorBank& bank, const GreyImage& image, std::size_t x0,
                                    std::size_t y, const EdgeRunConfig& cfg, std::uint64_t seed) {
    if (x0 + bank.window > image.width() || y >= image.height())
        throw ConfigError("edge detector: window falls outside the image");
    SimConfig sim = cfg.fabric.sim;
    sim.duration = cfg.duration;
    sim.validate();
    const Tick n = sim.ticks();

    Retina retina(image, cfg.retina, seed, sim.dt);
    PulseFabric fabric(sim, cfg.fabric.plasticity, bank.window);
    auto build_bank = [&](const std::vector<UnitPair>& pairs) {
        const std::uint32_t sum = fabric.add_summer();
        for (const auto& p : pairs) {
            const std::uint32_t u = fabric.add_subtractor();
            fabric.connect(static_cast<Address>(p.plus.x), u, Port::plus);
            fabric.connect(static_cast<Address>(p.minus.x), u, Port::minus);
            fabric.connect(fabric.address_of(u), sum, Port::plus);
        }
        return sum;
    };
    const std::uint32_t pos = build_bank(bank.positive_pairs);
    const std::uint32_t neg = build_bank(bank.negative_pairs);
    std::uint32_t pool = 0;
    if (bank.pooled) {
        pool = fabric.add_subtractor();
        fabric.connect(fabric.address_of(pos), pool, Port::plus);
        fabric.connect(fabric.address_of(neg), pool, Port::minus);
    }

    const std::size_t row_start = y * image.width() + x0;
    std::vector<Address> local;
    std::vector<std::uint64_t> at_half;
    const Tick half = n / 2;
    for (Tick t = 0; t < n; ++t) {
        if (t == half) at_half = fabric.unit_counts();
        local.clear();
        for (std::uint32_t a : retina.step())
            if (a >= row_start && a < row_start + bank.window) local.push_back(static_cast<Address>(a - row_start));
        fabric.step(local);
    }
    if (at_half.empty()) at_half = fabric.unit_counts();
    const double window = static_cast<double>(n - half) * sim.dt;
    if (window <= 0.0) return {};
    const auto& c = fabric.unit_counts();
    EdgeResponse r;
    r.positive = static_cast<double>(c[pos] - at_half[pos]) / window;
    r.negative = static_cast<double>(c[neg] - at_half[neg]) / window;
    if (bank.pooled) r.pooled = static_cast<double>(c[pool] - at_half[pool]) / window;
    return r;
}

GreyImage step_edge_image(std::size_t width, std::size_t height, std::size_t edge_x, double bright, double dark) {
    GreyImage img(width, height, dark);
    for (std::size_t y = 0; y < height; ++y)
        for (std::size_t x = 0; x < std::min(edge_x, width); ++x) img(x, y) = bright;
    return GreyImage::from_grid(img);
}

std::vector<EdgeSweepPoint> edge_displacement_sweep(std::size_t window, int max_displacement, double bright,
                                                    double dark, const EdgeRunConfig& cfg, std::uint64_t seed) {
    if (max_displacement < 0) throw ConfigError("edge sweep: max displacement must be >= 0");
    const EdgeDetectorBank bank = build_edge_detector(window, true);
    const auto margin = static_cast<std::size_t>(max_displacement) + 8;
    const std::size_t width = window + 2 * margin;
    const std::size_t x0 = margin;
    const auto centre = static_cast<int>(x0 + window / 2);
    std::vector<EdgeSweepPoint> out;
    for (int d = -max_displacement; d <= max_displacement; ++d) {
        const GreyImage img = step_edge_image(width, 1, static_cast<std::size_t>(centre + d), bright, dark);
        out.push_back({d, simulate_edge_detector(bank, img, x0, 0, cfg, seed)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Gabor pyramid

void PyramidConfig::validate() const {
    sim.validate();
    plasticity.validate();
    retina.validate();
    if (!(std::isfinite(sum_divisor) && sum_divisor >= 1.0)) throw ConfigError("pyramid: sum_divisor must be >= 1");
}

const char* stage_name(Stage s) {
    switch (s) {
    case Stage::retina: return "retina";
    case Stage::submask_plus: return "submask_plus";
    case Stage::submask_minus: return "submask_minus";
    case Stage::sum_plus: return "sum_plus";
    case Stage::sum_minus: return "sum_minus";
    case Stage::diff_forward: return "diff_forward";
    case Stage::diff_backward: return "diff_backward";
    case Stage::abs_response: return "abs_response";
    }
    return "?";
}

namespace {

GreyImage validated_image(const IntegerMask& mask, const GreyImage& image, const PyramidConfig& cfg) {
    cfg.validate();
    mask.require_zero_sum();
    if (mask.coeffs.width() > image.width() || mask.coeffs.height() > image.height())
        throw ConfigError("pyramid: mask larger than image");
    return image;
}

}  // namespace

GaborPyramid::GaborPyramid(const IntegerMask& mask, const GreyImage& image, const PyramidConfig& cfg)
    : cfg_(cfg),
      positive_(decompose_mask(mask)),
      retina_(validated_image(mask, image, cfg), cfg.retina, cfg.sim.seed, cfg.sim.dt),
      fabric_(cfg.sim, cfg.plasticity, image.size()),
      out_w_(image.width() - mask.coeffs.width() + 1),
      out_h_(image.height() - mask.coeffs.height() + 1),
      retina_counts_(image.size(), 0),
      end_(cfg.sim.ticks()) {
    const MaskDecomposition negative = positive_.negated();
    const double tag = 1.0 / cfg_.sum_divisor;
    auto pixel = [&](std::size_t x, std::size_t y, Offset o) {
        return static_cast<Address>((y + static_cast<std::size_t>(o.y)) * image.width() + x + static_cast<std::size_t>(o.x));
    };
    auto bank = [&](std::size_t x, std::size_t y, const MaskDecomposition& d) {
        const auto first = static_cast<std::uint32_t>(fabric_.unit_count());
        for (const auto& p : d.pairs) {
            const std::uint32_t u = fabric_.add_subtractor();
            fabric_.connect(pixel(x, y, p.plus), u, Port::plus);
            fabric_.connect(pixel(x, y, p.minus), u, Port::minus);
        }
        return first;
    };

    locations_.reserve(out_w_ * out_h_);
    for (std::size_t y = 0; y < out_h_; ++y)
        for (std::size_t x = 0; x < out_w_; ++x) {
            Location loc{};
            loc.first_plus_unit = bank(x, y, positive_);
            loc.first_minus_unit = bank(x, y, negative);
            loc.sum_plus = fabric_.add_summer();
            loc.sum_minus = fabric_.add_summer();
            for (std::size_t i = 0; i < positive_.pairs.size(); ++i) {
                fabric_.connect(fabric_.address_of(loc.first_plus_unit + static_cast<std::uint32_t>(i)), loc.sum_plus,
                                Port::plus, tag);
                fabric_.connect(fabric_.address_of(loc.first_minus_unit + static_cast<std::uint32_t>(i)), loc.sum_minus,
                                Port::plus, tag);
            }
            loc.pool = add_abs_pool(fabric_, fabric_.address_of(loc.sum_plus), fabric_.address_of(loc.sum_minus));
            locations_.push_back(loc);
        }

    const auto& v = image.values();
    brightest_ = static_cast<Address>(std::max_element(v.begin(), v.end()) - v.begin());
}

void GaborPyramid::step() {
    const auto& fired = retina_.step();
    for (std::uint32_t a : fired) ++retina_counts_[a];
    fabric_.step(fired);
}

void GaborPyramid::run() {
    while (tick() < end_) step();
}

std::size_t GaborPyramid::stage_width(Stage s) const noexcept {
    return s == Stage::retina ? retina_.width() : out_w_;
}

std::size_t GaborPyramid::stage_height(Stage s) const noexcept {
    return s == Stage::retina ? retina_.height() : out_h_;
}

PulseHistogram GaborPyramid::histogram(Stage s) const {
    PulseHistogram h(stage_width(s) * stage_height(s), 0);
    const auto& c = fabric_.unit_counts();
    const auto pairs = static_cast<std::uint32_t>(positive_.pairs.size());
    if (s == Stage::retina) {
        for (std::size_t a = 0; a < retina_counts_.size(); ++a) h.record(static_cast<Address>(a), retina_counts_[a]);
    } else {
        for (std::size_t i = 0; i < locations_.size(); ++i) {
            const Location& loc = locations_[i];
            std::uint64_t n = 0;
            switch (s) {
            case Stage::submask_plus:
                for (std::uint32_t k = 0; k < pairs; ++k) n += c[loc.first_plus_unit + k];
                break;
            case Stage::submask_minus:
                for (std::uint32_t k = 0; k < pairs; ++k) n += c[loc.first_minus_unit + k];
                break;
            case Stage::sum_plus: n = c[loc.sum_plus]; break;
            case Stage::sum_minus: n = c[loc.sum_minus]; break;
            case Stage::diff_forward: n = c[loc.pool.forward]; break;
            case Stage::diff_backward: n = c[loc.pool.backward]; break;
            case Stage::abs_response: n = c[loc.pool.sum]; break;
            case Stage::retina: break;
            }
            h.record(static_cast<Address>(i), n);
        }
    }
    h.close_window(tick());
    return h;
}

PyramidResult run_gabor_pyramid(const IntegerMask& mask, const GreyImage& image, const PyramidConfig& cfg,
                                const std::vector<std::uint64_t>& snapshot_pulses) {
    GaborPyramid pyramid(mask, image, cfg);
    std::vector<std::uint64_t> pending = snapshot_pulses;
    std::sort(pending.begin(), pending.end());
    pending.erase(std::unique(pending.begin(), pending.end()), pending.end());

    PyramidResult result;
    const Tick end = cfg.sim.ticks();
    std::size_t next = 0;
    while (pyramid.tick() < end) {
        pyramid.step();
        while (next < pending.size() && pyramid.brightest_pixel_pulses() >= pending[next]) {
            result.snapshots.push_back({pending[next], pyramid.tick(), pyramid.histogram(Stage::abs_response)});
            ++next;
        }
    }
    for (; next < pending.size(); ++next)
        result.snapshots.push_back({pending[next], pyramid.tick(), pyramid.histogram(Stage::abs_response)});
    for (Stage s : all_stages) result.stages.emplace(s, pyramid.histogram(s));
    result.out_width = pyramid.out_width();
    result.out_height = pyramid.out_height();
    result.image_width = image.width();
    result.image_height = image.height();
    return result;
}

RealGrid gabor_oracle(const IntegerMask& mask, const GreyImage& image, const OpticsModel& optics) {
    mask.require_zero_sum();
    const RealGrid smoothed = smooth_grid(image, optics);
    Grid<double> k(mask.coeffs.width(), mask.coeffs.height());
    for (std::size_t i = 0; i < k.size(); ++i) k[i] = mask.coeffs[i];
    return abs_grid(correlate_valid(smoothed, k));
}

GreyImage bars_and_disk_image(std::size_t width, std::size_t height) {
    GreyImage img(width, height, 40.0);
    const double w = static_cast<double>(width);
    const double h = static_cast<double>(height);
    for (std::size_t y = 0; y < height; ++y)
        for (std::size_t x = 0; x < width; ++x) {
            const double fx = (static_cast<double>(x) + 0.5) / w;
            const double fy = (static_cast<double>(y) + 0.5) / h;
            double v = 40.0;
            if (fx >= 0.12 && fx < 0.18 && fy >= 0.1 && fy < 0.9) v = 200.0;  // thin vertical bar
            if (fx >= 0.28 && fx < 0.40 && fy >= 0.1 && fy < 0.9) v = 160.0;  // wide vertical bar
            if (fy >= 0.12 && fy < 0.22 && fx >= 0.5 && fx < 0.92) v = 120.0; // horizontal bar
            const double dx = fx - 0.70, dy = fy - 0.62;
            if (dx * dx + dy * dy < 0.18 * 0.18) v = 230.0;                   // disk
            img(x, y) = v;
        }
    return img;
}

}  // namespace pulsegabor
