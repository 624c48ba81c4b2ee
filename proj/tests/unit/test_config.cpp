#include "pulsegabor/config.hpp"

#include <doctest.h>

#include <initializer_list>

using namespace pulsegabor;

TEST_SUITE("config") {

TEST_CASE("parser handles sections, comments and value kinds") {
    const auto t = parse_config_text(
        "# top\n"
        "[sim]\n"
        "seed = 7  # trailing\n"
        "duration = 1.5\n"
        "[output]\n"
        "dir = \"results/a\"\n"
        "[pyramid]\n"
        "snapshot_pulses = [3, 10, 30]\n"
        "[x]\n"
        "flag = true\n");
    CHECK(std::get<double>(t.at("sim.seed")) == 7.0);
    CHECK(std::get<double>(t.at("sim.duration")) == 1.5);
    CHECK(std::get<std::string>(t.at("output.dir")) == "results/a");
    CHECK(std::get<std::vector<double>>(t.at("pyramid.snapshot_pulses")).size() == 3);
    CHECK(std::get<bool>(t.at("x.flag")));
}

TEST_CASE("parser errors") {
    CHECK_THROWS_AS(parse_config_text("[sim]\nseed = 1\nseed = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[sim\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("novalue\n"), ConfigError);
}

TEST_CASE("run config applies known keys and rejects unknown ones") {
    RunConfig cfg;
    cfg.apply(parse_config_text("[sim]\nseed = 9\n[retina]\neta = 0.2\n[pyramid]\nsum_divisor = 4\n[mask]\nwavelength = 8\n"));
    CHECK(cfg.sim.seed == 9);
    CHECK(cfg.retina.noise_level == 0.2);
    CHECK(cfg.sum_divisor == 4.0);
    CHECK(cfg.gabor.gabor.wavelength == 8.0);
    RunConfig bad;
    CHECK_THROWS_AS(bad.apply(parse_config_text("[sim]\nbogus = 1\n")), ConfigError);
}

TEST_CASE("theta rescales plasticity defaults") {
    RunConfig cfg;
    cfg.apply(parse_config_text("[sim]\ntheta = 2\n"));
    CHECK(cfg.plasticity.w41.w_inf == 2.0);
    CHECK(cfg.plasticity.initial_w31 == 1.0);
}

TEST_CASE("gabor spec overrides") {
    RunConfig cfg;
    cfg.apply_gabor_spec("wavelength=6,orientation=0.5");
    CHECK(cfg.gabor.gabor.orientation == 0.5);
    CHECK_THROWS(cfg.apply_gabor_spec("colour=red"));
    CHECK_THROWS(cfg.apply_gabor_spec("wavelength"));
}

TEST_CASE("resolved config json echoes values") {
    RunConfig cfg;
    cfg.sim.seed = 33;
    const auto j = cfg.to_json();
    CHECK(j.at("sim").at("seed") == 33);
    CHECK(j.at("pyramid").at("sum_divisor") == cfg.sum_divisor);
}

}
