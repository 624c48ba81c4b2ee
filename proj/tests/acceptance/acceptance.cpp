// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include "pulsegabor/filters.hpp"
#include "pulsegabor/microcircuit.hpp"
#include "pulsegabor/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace pulsegabor;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
    std::printf("criterion %d %s: %s (%s)\n", id, name, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

RealGrid row(std::initializer_list<double> v) {
    return RealGrid(v.size(), 1, std::vector<double>(v));
}

void subtractor_law() {
    const auto t0 = Clock::now();
    const double r1 = 100.0, duration = 2.0, window = duration / 2.0;
    std::vector<double> r2;
    for (int i = 0; i <= 20; ++i) r2.push_back(10.0 * i);
    const auto rows = sweep_subtractor(r1, r2, duration, default_plasticity());
    double worst = 0.0, worst_above = 0.0;
    for (const auto& r : rows) {
        worst = std::max(worst, std::abs(r.stats.rate_4 - r.oracle));
        if (r.r2 >= r1) worst_above = std::max(worst_above, r.stats.rate_4 * window);
    }
    const double secs = seconds_since(t0);
    std::ostringstream d;
    d << "max |rate_4 - oracle| " << worst << " vs " << 0.15 * r1 << ", max pulses/window for r2>=r1 " << worst_above
      << ", runtime " << fmt("%.2f", secs) << " s";
    report(1, "subtractor law", worst <= 0.15 * r1 && worst_above <= 1.0 && secs < 30.0, d.str());
}

void mask_arithmetic() {
    const IntegerMask m = IntegerMask::row({1, -2, 1});
    const BankResponse a = static_bank_response(m, row({3, 2, 1}));
    const BankResponse b = static_bank_response(m, row({2, 2, 1}));
    const double ideal_b = 1.0 * 2 - 2.0 * 2 + 1.0 * 1;
    const bool static_ok = a.positive == 1.0 && a.negative == 1.0 && a.corrected == 0.0 && b.corrected == 0.0 &&
                           ideal_b == -1.0;

    // Same patterns at 20 pulses per unit per intensity step.
    const double scale = 20.0, duration = 4.0, window = duration / 2.0;
    const BankResponse sa = simulate_mask_bank(m, row({3 * scale, 2 * scale, 1 * scale}), duration);
    const BankResponse sb = simulate_mask_bank(m, row({2 * scale, 2 * scale, 1 * scale}), duration);
    const double tol = 0.15 * 3 * scale + 1.0 / window;
    const double err = std::max({std::abs(sa.positive - scale), std::abs(sa.negative - scale), std::abs(sa.corrected),
                                 std::abs(sb.corrected)});
    std::ostringstream d;
    d << "static pos " << a.positive << " neg " << a.negative << " corrected " << a.corrected << ", (2,2,1) corrected "
      << b.corrected << " ideal " << ideal_b << "; simulated x" << scale << " pos " << sa.positive << " neg "
      << sa.negative << " corrected " << sa.corrected << ", (2,2,1) corrected " << sb.corrected << ", max error "
      << err << " vs " << tol;
    report(2, "mask arithmetic", static_ok && err <= tol, d.str());
}

void abs_identity() {
    const double duration = 2.0, window = duration / 2.0;
    double worst_ratio = 0.0;
    std::string worst_at;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) {
            const double rp = 100.0 * i / 9.0, rm = 100.0 * j / 9.0;
            const RateMeasurement m = simulate_abs_pool(rp, rm, duration);
            const double tol = 0.15 * std::max(rp, rm) + 1.0 / window;
            const double ratio = std::abs(m.output - std::abs(rp - rm)) / tol;
            if (ratio > worst_ratio) {
                worst_ratio = ratio;
                std::ostringstream at;
                at << "(" << fmt("%.1f", rp) << ", " << fmt("%.1f", rm) << ") -> " << m.output;
                worst_at = at.str();
            }
        }
    report(3, "abs identity", worst_ratio <= 1.0,
           "worst error/tolerance " + fmt("%.3f", worst_ratio) + " at " + worst_at);
}

IntegerMask random_zero_sum_mask(std::mt19937& gen) {
    std::uniform_int_distribution<int> side(1, 9), coeff(-8, 8);
    for (;;) {
        const auto w = static_cast<std::size_t>(side(gen));
        const auto h = static_cast<std::size_t>(side(gen));
        if (w * h < 2) continue;
        Grid<int> c(w, h, 0);
        for (int& v : c.values()) v = coeff(gen);
        long long sum = 0;
        for (int v : c.values()) sum += v;
        for (std::size_t i = 0; i < c.size() && sum != 0; ++i) {
            const int room = sum > 0 ? c[i] + 8 : 8 - c[i];
            const int step = static_cast<int>(std::min<long long>(room, std::llabs(sum)));
            c[i] += sum > 0 ? -step : step;
            sum += sum > 0 ? -step : step;
        }
        bool any = false;
        for (int v : c.values()) any = any || v != 0;
        if (sum == 0 && any) return IntegerMask(std::move(c));
    }
}

void decomposition_round_trip() {
    std::mt19937 gen(20240601);
    std::uniform_int_distribution<int> pix(0, 255);
    int round_trip_failures = 0, path_failures = 0;
    for (int i = 0; i < 1000; ++i) {
        const IntegerMask m = random_zero_sum_mask(gen);
        const MaskDecomposition d = decompose_mask(m);
        if (reconstruct(d).values() != m.coeffs.values()) ++round_trip_failures;
        Grid<long long> img(m.coeffs.width() + 6, m.coeffs.height() + 5);
        for (auto& v : img.values()) v = pix(gen);
        Grid<long long> k(m.coeffs.width(), m.coeffs.height());
        for (std::size_t j = 0; j < k.size(); ++j) k[j] = m.coeffs[j];
        if (correlate_valid(img, k).values() != pair_path_response(img, d).values()) ++path_failures;
    }
    report(4, "decomposition round trip", round_trip_failures == 0 && path_failures == 0,
           std::to_string(round_trip_failures) + " reconstruction and " + std::to_string(path_failures) +
               " mask-path mismatches over 1000 masks");
}

struct PyramidRun {
    PyramidResult result;
    RealGrid full;
    double seconds = 0.0;
};

PyramidRun run_pyramid(const GreyImage& img, const IntegerMask& mask, double eta, std::uint64_t seed,
                       const std::vector<std::uint64_t>& snaps) {
    PyramidConfig cfg;
    cfg.retina.noise_level = eta;
    cfg.sim.seed = seed;
    const auto t0 = Clock::now();
    PyramidRun r;
    r.result = run_gabor_pyramid(mask, img, cfg, snaps);
    r.seconds = seconds_since(t0);
    r.full = r.result.stages.at(Stage::abs_response).to_grid(r.result.out_width, r.result.out_height);
    return r;
}

RealGrid shuffled(const RealGrid& g, std::uint64_t seed) {
    std::vector<double> v = g.values();
    std::mt19937_64 gen(seed);
    std::shuffle(v.begin(), v.end(), gen);
    return RealGrid(g.width(), g.height(), std::move(v));
}

void pyramid_criteria() {
    const GreyImage img = bars_and_disk_image(64, 64);
    const IntegerMask mask = default_gabor_mask();
    const PyramidConfig defaults;
    const PyramidRun clean = run_pyramid(img, mask, 0.0, 1, {3, 10, 30});

    const RealGrid oracle = gabor_oracle(mask, img, defaults.retina.optics);
    const double ncc = compare(clean.full, oracle).ncc;
    report(5, "pulsed gabor vs oracle", ncc >= 0.8 && clean.seconds < 300.0,
           "ncc " + fmt("%.4f", ncc) + " at duration " + fmt("%.1f", defaults.sim.duration) + ", runtime " +
               fmt("%.1f", clean.seconds) + " s");

    double worst = 1.0;
    std::string per_seed;
    for (std::uint64_t seed : {1, 2, 3}) {
        const PyramidRun noisy = run_pyramid(img, mask, 0.2, seed, {});
        const double n = compare(noisy.full, clean.full).ncc;
        worst = std::min(worst, n);
        per_seed += (per_seed.empty() ? "" : ", ") + std::string("seed ") + std::to_string(seed) + " " + fmt("%.4f", n);
    }
    report(6, "noise robustness", worst >= 0.85, "eta 0.2 vs 0 ncc: " + per_seed);

    std::vector<double> curve;
    std::string detail;
    double shuffled_ncc = 0.0;
    for (const auto& s : clean.result.snapshots) {
        const RealGrid g = s.response.to_grid(clean.result.out_width, clean.result.out_height);
        curve.push_back(compare(g, clean.full).ncc);
        detail += "k=" + std::to_string(s.trigger_pulses) + " " + fmt("%.4f", curve.back()) + ", ";
        if (s.trigger_pulses == 3) {
            double acc = 0.0;
            for (std::uint64_t k = 1; k <= 20; ++k) acc += compare(shuffled(g, k), clean.full).ncc;
            shuffled_ncc = acc / 20.0;
        }
    }
    curve.push_back(1.0);
    detail += "full 1, shuffled k=3 " + fmt("%.4f", shuffled_ncc);
    bool monotone = true;
    for (std::size_t i = 1; i < curve.size(); ++i) monotone = monotone && curve[i] >= curve[i - 1] - 0.02;
    report(7, "coarse to fine", curve.size() == 4 && curve[0] > shuffled_ncc && monotone, detail);
}

void edge_detector() {
    EdgeRunConfig cfg;
    const double window_time = cfg.duration / 2.0;
    double uniform_worst = 0.0;
    for (double b : {0.0, 60.0, 128.0, 255.0}) {
        const EdgeResponse r = simulate_edge_detector(build_edge_detector(4, true), GreyImage(24, 1, b), 10, 0, cfg, 1);
        uniform_worst = std::max({uniform_worst, r.positive * window_time, r.pooled * window_time});
    }
    const auto sweep = edge_displacement_sweep(4, 8, 200.0, 50.0, cfg, 1);
    std::vector<double> unpooled, pooled;
    for (const auto& p : sweep) {
        unpooled.push_back(p.response.positive);
        pooled.push_back(p.response.pooled);
    }
    const auto peak = std::max_element(unpooled.begin(), unpooled.end()) - unpooled.begin();
    const double slack = 1.0 / window_time;
    bool single = unpooled[static_cast<std::size_t>(peak)] > slack;
    for (std::ptrdiff_t i = 1; i <= peak; ++i) single = single && unpooled[i] >= unpooled[i - 1] - slack;
    for (std::size_t i = static_cast<std::size_t>(peak) + 1; i < unpooled.size(); ++i)
        single = single && unpooled[i] <= unpooled[i - 1] + slack;
    bool pooled_below = true;
    for (std::size_t i = 0; i < pooled.size(); ++i) pooled_below = pooled_below && pooled[i] <= unpooled[i];
    const double pooled_peak = *std::max_element(pooled.begin(), pooled.end());
    std::ostringstream d;
    d << "uniform max pulses/window " << uniform_worst << ", unpooled";
    for (double v : unpooled) d << ' ' << v;
    d << ", pooled";
    for (double v : pooled) d << ' ' << v;
    report(8, "edge detector",
           uniform_worst <= 1.0 && single && pooled_below && pooled_peak <= unpooled[static_cast<std::size_t>(peak)],
           d.str());
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void determinism() {
    const fs::path root = fs::temp_directory_path() / "pulsegabor_acceptance";
    fs::remove_all(root);
    const std::string exe = PULSEGABOR_CLI;
    const std::vector<std::string> runs = {
        "demo-subtractor --r1 100 --sweep-r2 0:200:20",
        "edge --eta 0.2 --seed 4 --max-displacement 4",
        "oracle --synthetic 32",
        "filter --synthetic 24 --eta 0.2 --seed 9 --duration 1 --snapshot-pulses 3,10 --dump-routing",
    };
    int mismatches = 0, files = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        for (const char* rep : {"a", "b"}) {
            const fs::path out = root / std::to_string(i) / rep;
            const std::string cmd = exe + " " + runs[i] + " --out " + out.string() + " > /dev/null";
            if (std::system(cmd.c_str()) != 0) ++mismatches;
        }
        const fs::path a = root / std::to_string(i) / "a";
        const fs::path b = root / std::to_string(i) / "b";
        std::size_t in_a = 0, in_b = 0;
        for (const auto& e : fs::directory_iterator(a)) {
            ++in_a;
            ++files;
            if (slurp(e.path()) != slurp(b / e.path().filename())) ++mismatches;
        }
        for ([[maybe_unused]] const auto& e : fs::directory_iterator(b)) ++in_b;
        if (in_a != in_b) ++mismatches;
    }
    report(9, "determinism", mismatches == 0 && files > 0,
           std::to_string(files) + " files over " + std::to_string(runs.size()) + " repeated CLI runs, " +
               std::to_string(mismatches) + " mismatches");
}

}  // namespace

int main() {
    const std::vector<std::function<void()>> checks = {subtractor_law,  mask_arithmetic, abs_identity,
                                                       decomposition_round_trip, pyramid_criteria, edge_detector,
                                                       determinism};
    for (const auto& c : checks) {
        try {
            c();
        } catch (const std::exception& e) {
            std::printf("unexpected error: %s\n", e.what());
            ++failures;
        }
    }
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
