#include "pulsegabor/cli.hpp"

#include "pulsegabor/aer.hpp"
#include "pulsegabor/config.hpp"
#include "pulsegabor/filters.hpp"
#include "pulsegabor/microcircuit.hpp"
#include "pulsegabor/oracle.hpp"
#include "pulsegabor/pgm.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>

namespace pulsegabor {

namespace {

namespace fs = std::filesystem;

struct CommonFlags {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<double> duration;
    std::optional<double> eta;
    std::optional<double> sigma;
    std::optional<double> sum_divisor;
};

void add_common(CLI::App* app, CommonFlags& f) {
    app->add_option("--config", f.config, "TOML-style config file");
    app->add_option("--out", f.out, "Output directory");
    app->add_option("--seed", f.seed, "RNG seed (falls back to config, then PULSEGABOR_SEED)");
    app->add_option("--duration", f.duration, "Simulated time");
    app->add_option("--eta", f.eta, "Relative pixel-current noise");
    app->add_option("--sigma", f.sigma, "Optical smoothing sigma in pixels");
    app->add_option("--sum-divisor", f.sum_divisor, "Submask-to-sum weight divisor");
}

RunConfig resolve(const CommonFlags& f) {
    RunConfig cfg;
    bool seed_from_config = false;
    if (!f.config.empty()) {
        const ConfigTable table = read_config_file(f.config);
        seed_from_config = table.count("sim.seed") > 0;
        cfg.apply(table);
    }
    if (f.seed) {
        cfg.sim.seed = *f.seed;
    } else if (!seed_from_config) {
        if (auto env = seed_from_environment()) cfg.sim.seed = *env;
    }
    if (f.duration) cfg.sim.duration = *f.duration;
    if (f.eta) cfg.retina.noise_level = *f.eta;
    if (f.sigma) cfg.retina.optics.sigma = *f.sigma;
    if (f.sum_divisor) cfg.sum_divisor = *f.sum_divisor;
    if (!f.out.empty()) cfg.output_dir = f.out;
    return cfg;
}

class OutputDir {
public:
    explicit OutputDir(fs::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw ConfigError("cannot create output directory " + dir_.string() + ": " + ec.message());
    }

    fs::path path(const std::string& name) {
        written_.insert(name);
        return dir_ / name;
    }

    void text(const std::string& name, const std::string& body) {
        std::ofstream out(path(name), std::ios::binary);
        out << body;
        if (!out) throw ConfigError("cannot write " + (dir_ / name).string());
    }

    void json(const std::string& name, const nlohmann::json& j) { text(name, j.dump(2) + "\n"); }
    void pgm(const std::string& name, const GreyImage& img) { write_pgm(path(name), img); }

    void manifest(const std::string& command, const nlohmann::json& arguments, const RunConfig& cfg) {
        written_.insert("manifest.json");
        nlohmann::json m;
        m["command"] = command;
        m["arguments"] = arguments;
        m["config"] = cfg.to_json();
        m["config"].erase("output");  // keep manifests identical across output directories
        m["outputs"] = std::vector<std::string>(written_.begin(), written_.end());
        std::ofstream out(dir_ / "manifest.json", std::ios::binary);
        out << m.dump(2) << "\n";
        if (!out) throw ConfigError("cannot write manifest");
    }

private:
    fs::path dir_;
    std::set<std::string> written_;
};

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string grid_csv(const RealGrid& g) {
    std::ostringstream out;
    out << "x,y,value\n";
    for (std::size_t y = 0; y < g.height(); ++y)
        for (std::size_t x = 0; x < g.width(); ++x) out << x << ',' << y << ',' << format_number(g(x, y)) << '\n';
    return out.str();
}

std::vector<double> parse_range(const std::string& spec) {
    std::vector<double> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw CLI::ValidationError("--sweep-r2", "expected start:stop:step, got '" + spec + "'");
        }
    }
    if (parts.size() != 3 || parts[2] <= 0.0 || parts[1] < parts[0])
        throw CLI::ValidationError("--sweep-r2", "expected start:stop:step with step > 0");
    std::vector<double> out;
    const auto n = static_cast<long long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
    for (long long i = 0; i <= n; ++i) out.push_back(parts[0] + static_cast<double>(i) * parts[2]);
    return out;
}

struct ImageSource {
    std::string image;
    std::optional<std::size_t> synthetic;

    void add(CLI::App* app) {
        auto* img = app->add_option("--image", image, "Input PGM image");
        auto* syn = app->add_option("--synthetic", synthetic, "Use the built-in bars-and-disk scene of size NxN");
        img->excludes(syn);
    }

    GreyImage load() const {
        if (synthetic) {
            if (*synthetic < 8) throw ConfigError("synthetic image must be at least 8x8");
            return bars_and_disk_image(*synthetic, *synthetic);
        }
        if (image.empty()) throw CLI::RequiredError("--image or --synthetic");
        return read_pgm(image);
    }

    nlohmann::json describe() const {
        if (synthetic) return {{"synthetic", *synthetic}};
        return {{"image", image}};
    }
};

struct MaskSource {
    std::string gabor;
    std::string mask;

    void add(CLI::App* app) {
        auto* g = app->add_option("--gabor", gabor, "Gabor overrides, e.g. wavelength=6,orientation=0");
        auto* m = app->add_option("--mask", mask, "Integer mask JSON file");
        g->excludes(m);
    }

    void apply(RunConfig& cfg) const {
        if (!mask.empty()) cfg.mask_file = fs::path(mask);
        if (!gabor.empty()) {
            cfg.mask_file.reset();
            cfg.apply_gabor_spec(gabor);
        }
    }
};

std::vector<std::uint64_t> parse_counts(const std::vector<std::string>& items) {
    std::vector<std::uint64_t> out;
    for (const auto& item : items) {
        std::stringstream ss(item);
        std::string part;
        while (std::getline(ss, part, ',')) {
            if (part.empty()) continue;
            if (part.find_first_not_of("0123456789") != std::string::npos)
                throw CLI::ValidationError("--snapshot-pulses", "not a pulse count: " + part);
            out.push_back(std::stoull(part));
        }
    }
    return out;
}

// Fixed-seed permutation used as the shuffled-snapshot baseline.
RealGrid shuffled(const RealGrid& g, std::uint64_t seed) {
    std::vector<double> v = g.values();
    PixelRng rng(seed, 0x5eed);
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng() % i]);
    return RealGrid(g.width(), g.height(), std::move(v));
}

int cmd_demo_subtractor(const CommonFlags& common, double r1, const std::string& sweep) {
    RunConfig cfg = resolve(common);
    cfg.validate();
    const std::vector<double> r2 = parse_range(sweep);
    const auto rows = sweep_subtractor(r1, r2, cfg.sim.duration, cfg.plasticity, cfg.sim);
    OutputDir out(cfg.output_dir);
    std::ostringstream csv;
    write_sweep_csv(csv, rows);
    out.text("subtractor_sweep.csv", csv.str());
    out.manifest("demo-subtractor", {{"r1", r1}, {"sweep_r2", sweep}}, cfg);
    std::cout << (cfg.output_dir / "subtractor_sweep.csv").string() << "\n";
    return 0;
}

int cmd_edge(const CommonFlags& common, std::size_t window, int max_disp, double bright, double dark) {
    RunConfig cfg = resolve(common);
    cfg.validate();
    if (!(bright >= 0.0 && bright <= 255.0 && dark >= 0.0 && dark <= 255.0))
        throw ConfigError("edge: brightness values must lie in [0, 255]");
    EdgeRunConfig ec;
    ec.fabric.sim = cfg.sim;
    ec.fabric.plasticity = cfg.plasticity;
    ec.retina = cfg.retina;
    ec.duration = cfg.sim.duration;
    const auto sweep = edge_displacement_sweep(window, max_disp, bright, dark, ec, cfg.sim.seed);

    OutputDir out(cfg.output_dir);
    std::ostringstream csv;
    csv << "displacement,unpooled,negative,pooled\n";
    for (const auto& p : sweep)
        csv << p.displacement << ',' << format_number(p.response.positive) << ','
            << format_number(p.response.negative) << ',' << format_number(p.response.pooled) << '\n';
    out.text("edge_sweep.csv", csv.str());
    out.manifest("edge", {{"window", window}, {"max_displacement", max_disp}, {"bright", bright}, {"dark", dark}}, cfg);
    std::cout << (cfg.output_dir / "edge_sweep.csv").string() << "\n";
    return 0;
}

int cmd_filter(const CommonFlags& common, const ImageSource& src, const MaskSource& ms,
               const std::vector<std::string>& snapshots, bool dump_routing) {
    RunConfig cfg = resolve(common);
    ms.apply(cfg);
    if (!snapshots.empty()) cfg.snapshot_pulses = parse_counts(snapshots);
    cfg.validate();
    const GreyImage image = src.load();
    const IntegerMask mask = cfg.mask();
    const PyramidConfig pc = cfg.pyramid();

    OutputDir out(cfg.output_dir);
    if (src.synthetic) out.pgm("input.pgm", image);
    out.json("mask.json", mask.to_json());

    PyramidResult res;
    if (dump_routing) {
        GaborPyramid probe(mask, image, pc);
        out.json("routing.json", probe.fabric().routing().to_json());
    }
    res = run_gabor_pyramid(mask, image, pc, cfg.snapshot_pulses);

    for (Stage s : all_stages) {
        const auto& h = res.stages.at(s);
        const bool on_image = s == Stage::retina;
        const std::size_t w = on_image ? res.image_width : res.out_width;
        const std::size_t hgt = on_image ? res.image_height : res.out_height;
        char name[64];
        std::snprintf(name, sizeof name, "stage_%d_%s.pgm", static_cast<int>(s), stage_name(s));
        out.pgm(name, histogram_to_image(h, w, hgt));
    }
    const PulseHistogram& response = res.stages.at(Stage::abs_response);
    const RealGrid full = response.to_grid(res.out_width, res.out_height);
    out.pgm("response.pgm", histogram_to_image(response, res.out_width, res.out_height));
    out.text("response.csv", grid_csv(full));

    const RealGrid oracle = gabor_oracle(mask, image, cfg.retina.optics);
    out.pgm("oracle.pgm", rescale_to_grey(oracle));

    nlohmann::json metrics;
    const SimilarityReport vs_oracle = compare(full, oracle);
    metrics["ncc_vs_oracle"] = vs_oracle.ncc;
    metrics["response_total"] = response.total();
    metrics["response_max"] = response.max_count();
    metrics["ticks"] = response.t1();
    nlohmann::json snaps = nlohmann::json::array();
    for (const auto& s : res.snapshots) {
        const RealGrid g = s.response.to_grid(res.out_width, res.out_height);
        char name[64];
        std::snprintf(name, sizeof name, "snapshot_%llu.pgm", static_cast<unsigned long long>(s.trigger_pulses));
        out.pgm(name, histogram_to_image(s.response, res.out_width, res.out_height));
        snaps.push_back({{"pulses", s.trigger_pulses},
                         {"tick", s.tick},
                         {"file", name},
                         {"ncc_vs_full", compare(g, full).ncc},
                         {"ncc_shuffled_vs_full", compare(shuffled(g, cfg.sim.seed), full).ncc}});
    }
    metrics["snapshots"] = snaps;
    out.json("metrics.json", metrics);

    nlohmann::json args = src.describe();
    args["dump_routing"] = dump_routing;
    out.manifest("filter", args, cfg);
    std::cout << "ncc_vs_oracle " << format_number(vs_oracle.ncc) << "\n";
    return 0;
}

int cmd_oracle(const CommonFlags& common, const ImageSource& src, const MaskSource& ms) {
    RunConfig cfg = resolve(common);
    ms.apply(cfg);
    cfg.validate();
    const GreyImage image = src.load();
    const IntegerMask mask = cfg.mask();
    const RealGrid oracle = gabor_oracle(mask, image, cfg.retina.optics);
    OutputDir out(cfg.output_dir);
    if (src.synthetic) out.pgm("input.pgm", image);
    out.json("mask.json", mask.to_json());
    out.pgm("oracle.pgm", rescale_to_grey(oracle));
    out.text("oracle.csv", grid_csv(oracle));
    out.manifest("oracle", src.describe(), cfg);
    std::cout << (cfg.output_dir / "oracle.pgm").string() << "\n";
    return 0;
}

int cmd_compare(const CommonFlags& common, const std::string& a, const std::string& b) {
    RunConfig cfg = resolve(common);
    const GreyImage ia = read_pgm(a);
    const GreyImage ib = read_pgm(b);
    const SimilarityReport r = compare(ia, ib);
    const nlohmann::json metrics = {{"ncc", r.ncc}, {"mae", r.mae}, {"max_abs", r.max_abs}};
    OutputDir out(cfg.output_dir);
    out.json("metrics.json", metrics);
    out.manifest("compare", {{"a", a}, {"b", b}}, cfg);
    std::cout << metrics.dump() << "\n";
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Pulse-based Gabor filtering with excitatory microcircuits"};
    app.require_subcommand(1);

    CommonFlags common;

    auto* demo = app.add_subcommand("demo-subtractor", "Sweep r2 at fixed r1 through one microcircuit");
    add_common(demo, common);
    double r1 = 100.0;
    std::string sweep = "0:200:10";
    demo->add_option("--r1", r1, "Rate of the plus input");
    demo->add_option("--sweep-r2", sweep, "start:stop:step for the minus input rate");

    auto* edge = app.add_subcommand("edge", "Step-edge displacement sweep, unpooled vs pooled");
    add_common(edge, common);
    std::size_t window = 4;
    int max_disp = 8;
    double bright = 200.0, dark = 50.0;
    edge->add_option("--window", window, "Detector width in pixels");
    edge->add_option("--max-displacement", max_disp, "Sweep edge offsets in [-d, d]");
    edge->add_option("--bright", bright, "Brightness left of the edge");
    edge->add_option("--dark", dark, "Brightness right of the edge");

    auto* filter = app.add_subcommand("filter", "Run the pulsed Gabor pyramid on an image");
    add_common(filter, common);
    ImageSource filter_src;
    MaskSource filter_mask;
    std::vector<std::string> snapshots;
    bool dump_routing = false;
    filter_src.add(filter);
    filter_mask.add(filter);
    filter->add_option("--snapshot-pulses", snapshots, "Brightest-pixel pulse counts for early snapshots");
    filter->add_flag("--dump-routing", dump_routing, "Also write the AER routing table as JSON");

    auto* oracle = app.add_subcommand("oracle", "Conventional |convolution| of the smoothed image");
    add_common(oracle, common);
    ImageSource oracle_src;
    MaskSource oracle_mask;
    oracle_src.add(oracle);
    oracle_mask.add(oracle);

    auto* cmp = app.add_subcommand("compare", "Similarity metrics between two PGM images");
    add_common(cmp, common);
    std::string a, b;
    cmp->add_option("--a", a, "First image")->required();
    cmp->add_option("--b", b, "Second image")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*demo) return cmd_demo_subtractor(common, r1, sweep);
        if (*edge) return cmd_edge(common, window, max_disp, bright, dark);
        if (*filter) return cmd_filter(common, filter_src, filter_mask, snapshots, dump_routing);
        if (*oracle) return cmd_oracle(common, oracle_src, oracle_mask);
        if (*cmp) return cmd_compare(common, a, b);
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& s : args) argv.push_back(s.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace pulsegabor
