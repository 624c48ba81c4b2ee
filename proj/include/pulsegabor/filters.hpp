#pragma once

#include "pulsegabor/aer.hpp"
#include "pulsegabor/grid.hpp"
#include "pulsegabor/kernel.hpp"
#include "pulsegabor/microcircuit.hpp"
#include "pulsegabor/oracle.hpp"
#include "pulsegabor/plasticity.hpp"
#include "pulsegabor/retina.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

namespace pulsegabor {

// ---------------------------------------------------------------------------
// Integer masks and their decomposition into unit (+, -) pairs.

struct IntegerMask {
    Grid<int> coeffs;
    std::size_t anchor_x = 0;
    std::size_t anchor_y = 0;

    IntegerMask() = default;
    // Anchor defaults to the centre tap.
    explicit IntegerMask(Grid<int> c);
    IntegerMask(Grid<int> c, std::size_t ax, std::size_t ay);
    static IntegerMask row(std::vector<int> values);

    long long sum() const;
    // Throws ConfigError naming the sum when it is not zero.
    void require_zero_sum() const;

    // {"coefficients": [[...], ...], "anchor": [x, y]}
    nlohmann::json to_json() const;
    static IntegerMask from_json(const nlohmann::json& j);
};

struct Offset {
    int x = 0;
    int y = 0;

    friend bool operator==(const Offset&, const Offset&) = default;
    friend auto operator<=>(const Offset&, const Offset&) = default;
};

struct UnitPair {
    Offset plus;
    Offset minus;

    friend bool operator==(const UnitPair&, const UnitPair&) = default;
};

enum class Polarity : std::uint8_t { positive, negative };

struct MaskDecomposition {
    std::vector<UnitPair> pairs;
    Polarity polarity = Polarity::positive;
    std::size_t width = 0;
    std::size_t height = 0;

    // Same pairs with plus and minus swapped.
    MaskDecomposition negated() const;
};

// Positives are scanned row-major; each unit takes the nearest remaining
// negative unit (squared distance, ties to the earlier row-major offset).
// Offsets are relative to the mask's top-left tap.
MaskDecomposition decompose_mask(const IntegerMask& mask);

// +1 at every plus offset, -1 at every minus offset.
Grid<int> reconstruct(const MaskDecomposition& d);

// Ideal steady-state bank output: sum over pairs of max(rate[plus] - rate[minus], 0).
// `pattern` is indexed by mask offsets.
double static_mask_response(const MaskDecomposition& d, const RealGrid& pattern);

struct BankResponse {
    double positive = 0.0;
    double negative = 0.0;
    double corrected = 0.0;  // max(positive - negative, 0)
};

BankResponse static_bank_response(const IntegerMask& mask, const RealGrid& pattern);

// Integer path of the mask: per location, sum over pairs of img[plus] - img[minus].
Grid<long long> pair_path_response(const Grid<long long>& img, const MaskDecomposition& d);

// Scales the kernel so its largest magnitude becomes `max_coeff`, rounds
// down and hands the missing units to the largest remainders so that the
// mask sums to exactly zero.
IntegerMask quantize_kernel(const RealKernel& k, int max_coeff);

struct GaborMaskParams {
    GaborParams gabor{};
    int max_coeff = 4;
};

IntegerMask default_gabor_mask(const GaborMaskParams& p = {});

// ---------------------------------------------------------------------------
// AER-connected pulse units on a shared network.

// Unit kinds addressable through the routing table. External sources (pixel
// cells, test trains) occupy addresses [0, external_sources); unit u has
// address external_sources + u.
class PulseFabric {
public:
    PulseFabric(const SimConfig& sim, const PlasticityParams& plasticity, std::size_t external_sources);

    // Microcircuit unit: plus -> neuron 1, minus -> neuron 2, output neuron 4.
    std::uint32_t add_subtractor();
    // Single IAF neuron; every delivery adds theta * weight tag.
    std::uint32_t add_summer();

    // Wires a source address to a unit port.
    void connect(Address source, std::uint32_t unit, Port port, double weight = 1.0);
    Address address_of(std::uint32_t unit) const noexcept {
        return static_cast<Address>(external_ + unit);
    }

    // One tick: integrate, then route this tick's external pulses and unit
    // outputs (they act on the next tick).
    void step(std::span<const Address> external_fired);

    Tick tick() const noexcept { return network_.tick(); }
    std::size_t unit_count() const noexcept { return outputs_.size(); }
    std::size_t external_sources() const noexcept { return external_; }
    const RoutingTable& routing() const noexcept { return table_; }
    const Network& network() const noexcept { return network_; }

    // Output pulses of every unit since construction.
    const std::vector<std::uint64_t>& unit_counts() const noexcept { return unit_counts_; }
    // Units that fired during the last step, ascending.
    const std::vector<std::uint32_t>& fired_units() const noexcept { return fired_units_; }

private:
    struct Ports {
        NeuronId plus;
        NeuronId minus;
    };

    void finalize();

    SimConfig sim_;
    PlasticityParams plasticity_;
    std::size_t external_;
    Network network_;
    RoutingTable table_;
    std::vector<Ports> ports_;
    std::vector<NeuronId> outputs_;
    std::vector<std::uint64_t> unit_counts_;
    std::vector<std::uint32_t> fired_units_;
    bool finalized_ = false;
    // Flattened routing (address -> deliveries) built on the first step.
    std::vector<std::uint32_t> route_offsets_;
    std::vector<NeuronId> route_neuron_;
    std::vector<double> route_charge_;
};

struct AbsPoolUnits {
    std::uint32_t forward = 0;   // (R+ - R-)+
    std::uint32_t backward = 0;  // (R- - R+)+
    std::uint32_t sum = 0;       // R_abs
};

// Two subtractors with swapped inputs feeding one summer.
AbsPoolUnits add_abs_pool(PulseFabric& fabric, Address r_plus, Address r_minus);

struct FabricConfig {
    SimConfig sim{};
    PlasticityParams plasticity = default_plasticity();
};

struct RateMeasurement {
    double input_plus = 0.0;
    double input_minus = 0.0;
    double output = 0.0;
};

// Feeds regular trains (second train half a period behind) into abs_pool and
// reports rates over the second half of the run.
RateMeasurement simulate_abs_pool(double r_plus, double r_minus, double duration, const FabricConfig& cfg = {});

// Pulsed version of static_bank_response: every pattern entry becomes a
// regular train at that rate; both polarities are summed and the corrected
// output is a subtractor over the two sums. Rates over the second half.
BankResponse simulate_mask_bank(const IntegerMask& mask, const RealGrid& pattern_rates, double duration,
                                const FabricConfig& cfg = {});

// ---------------------------------------------------------------------------
// Edge detector.

struct EdgeDetectorBank {
    std::size_t window = 0;  // pixels
    bool pooled = false;
    // Offsets inside the window: positive bank reads (left, right), the
    // negative bank the same pixels reversed.
    std::vector<UnitPair> positive_pairs;
    std::vector<UnitPair> negative_pairs;
};

EdgeDetectorBank build_edge_detector(std::size_t window, bool pooled);

struct EdgeResponse {
    double positive = 0.0;  // summed positive bank (unpooled response)
    double negative = 0.0;
    double pooled = 0.0;    // positive minus negative through one more subtractor
};

struct EdgeRunConfig {
    FabricConfig fabric{};
    RetinaConfig retina{};
    double duration = 2.0;
};

// Runs the detector with its window's left edge at column x0 of row y.
// Rates are measured over the second half of the run.
EdgeResponse simulate_edge_detector(const EdgeDetectorBank& bank, const GreyImage& image, std::size_t x0,
                                    std::size_t y, const EdgeRunConfig& cfg, std::uint64_t seed);

// Bright-to-dark step: columns < edge_x are `bright`, the rest `dark`.
GreyImage step_edge_image(std::size_t width, std::size_t height, std::size_t edge_x, double bright, double dark);

struct EdgeSweepPoint {
    int displacement = 0;  // edge column minus window centre
    EdgeResponse response;
};

std::vector<EdgeSweepPoint> edge_displacement_sweep(std::size_t window, int max_displacement, double bright,
                                                    double dark, const EdgeRunConfig& cfg, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Gabor processing pyramid.

struct PyramidConfig {
    SimConfig sim{.dt = 0.001, .duration = 2.0, .seed = 1, .theta = 1.0};
    PlasticityParams plasticity = default_plasticity();
    RetinaConfig retina{};
    // Submask outputs reach R+ / R- with weight theta / sum_divisor.
    double sum_divisor = 8.0;

    void validate() const;
};

enum class Stage : std::uint8_t {
    retina = 1,
    submask_plus,
    submask_minus,
    sum_plus,
    sum_minus,
    diff_forward,
    diff_backward,
    abs_response,
};

const char* stage_name(Stage s);
inline constexpr Stage all_stages[] = {Stage::retina,     Stage::submask_plus, Stage::submask_minus,
                                       Stage::sum_plus,   Stage::sum_minus,    Stage::diff_forward,
                                       Stage::diff_backward, Stage::abs_response};

class GaborPyramid {
public:
    GaborPyramid(const IntegerMask& mask, const GreyImage& image, const PyramidConfig& cfg);

    void step();
    Tick tick() const noexcept { return fabric_.tick(); }
    // Runs up to cfg.sim.duration.
    void run();

    // Pulses emitted so far by the brightest pixel of the input image.
    std::uint64_t brightest_pixel_pulses() const noexcept { return retina_counts_[brightest_]; }
    Address brightest_pixel() const noexcept { return brightest_; }

    // Stage histograms over [0, tick()). Retina taps use the image grid,
    // every other stage the valid-region grid.
    PulseHistogram histogram(Stage s) const;
    std::size_t stage_width(Stage s) const noexcept;
    std::size_t stage_height(Stage s) const noexcept;

    std::size_t out_width() const noexcept { return out_w_; }
    std::size_t out_height() const noexcept { return out_h_; }
    const Retina& retina() const noexcept { return retina_; }
    const PulseFabric& fabric() const noexcept { return fabric_; }
    const MaskDecomposition& decomposition() const noexcept { return positive_; }

private:
    struct Location {
        std::uint32_t first_plus_unit;
        std::uint32_t first_minus_unit;
        std::uint32_t sum_plus, sum_minus;
        AbsPoolUnits pool;
    };

    PyramidConfig cfg_;
    MaskDecomposition positive_;
    Retina retina_;
    PulseFabric fabric_;
    std::size_t out_w_ = 0, out_h_ = 0;
    std::vector<Location> locations_;
    std::vector<std::uint64_t> retina_counts_;
    Address brightest_ = 0;
    Tick end_ = 0;
};

struct PyramidSnapshot {
    std::uint64_t trigger_pulses = 0;  // brightest-pixel pulse count that fired the snapshot
    Tick tick = 0;
    PulseHistogram response;           // abs_response stage at that moment
};

struct PyramidResult {
    std::map<Stage, PulseHistogram> stages;
    std::vector<PyramidSnapshot> snapshots;
    std::size_t out_width = 0, out_height = 0;
    std::size_t image_width = 0, image_height = 0;
};

// Builds and runs the pyramid. A snapshot of the final response is taken at
// the end of the tick in which the brightest pixel emits its k-th pulse, for
// every k in `snapshot_pulses` (never reached -> taken at the end).
PyramidResult run_gabor_pyramid(const IntegerMask& mask, const GreyImage& image, const PyramidConfig& cfg,
                                const std::vector<std::uint64_t>& snapshot_pulses = {});

// Reference for the pyramid: |valid correlation| of the optically smoothed image.
RealGrid gabor_oracle(const IntegerMask& mask, const GreyImage& image, const OpticsModel& optics);

// 64x64-style test scene: vertical and horizontal bars plus a bright disk.
GreyImage bars_and_disk_image(std::size_t width, std::size_t height);

}  // namespace pulsegabor
