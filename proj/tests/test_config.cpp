#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "vad/config.hpp"

using Catch::Matchers::ContainsSubstring;
using namespace vad;

namespace {

Config parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config_text(in);
}

}  // namespace

TEST_CASE("empty config text yields all defaults") {
    Config c = parse("");
    REQUIRE(c.H == 40);
    REQUIRE(c.W == 40);
    REQUIRE(c.T == 4);
    REQUIRE(c.s == 20);
    REQUIRE(c.alpha == 0.1);
    REQUIRE(c.beta == 0.1);
    REQUIRE(c.blur_sigma == 5.0);
    REQUIRE(c.fg_threshold == 12.0);
    REQUIRE_FALSE(c.exemplar_threshold.has_value());
    REQUIRE(c.bg_init_frames == 200);
    REQUIRE(c.bg_update_weight == 0.95);
    REQUIRE(c.connectivity == 4);
    REQUIRE(c.flow_block == 8);
    REQUIRE(c.flow_radius == 7);
    REQUIRE(c.num_thresholds == 201);
    REQUIRE_FALSE(c.thresholds.has_value());
    REQUIRE(c == Config{});
}

TEST_CASE("a single key overrides only that key") {
    Config c = parse("T = 7\n");
    REQUIRE(c.T == 7);
    Config defaults;
    defaults.T = 7;
    REQUIRE(c == defaults);
}

TEST_CASE("alpha outside (0, 1] is a range error") {
    REQUIRE_THROWS_WITH(parse("alpha = 1.5\n"), ContainsSubstring("alpha"));
    REQUIRE_THROWS_WITH(parse("alpha = 0\n"), ContainsSubstring("alpha"));
}

TEST_CASE("unknown keys are rejected") {
    REQUIRE_THROWS_WITH(parse("sigma = 3\n"), ContainsSubstring("unknown key"));
}

TEST_CASE("comments and blank lines are ignored") {
    Config c = parse("# tuned for the small fixture\n\nH = 20  # patch height\nW = 20\n");
    REQUIRE(c.H == 20);
    REQUIRE(c.W == 20);
}

TEST_CASE("malformed lines are reported with their line number") {
    REQUIRE_THROWS_WITH(parse("H = 20\nnot a pair\n"), ContainsSubstring("line 2"));
    REQUIRE_THROWS_WITH(parse("H = twenty\n"), ContainsSubstring("bad integer"));
    REQUIRE_THROWS_WITH(parse("alpha = fast\n"), ContainsSubstring("bad number"));
}

TEST_CASE("constraint violations are rejected after parsing") {
    REQUIRE_THROWS_WITH(parse("connectivity = 5\n"), ContainsSubstring("connectivity"));
    REQUIRE_THROWS_WITH(parse("num_thresholds = 1\n"), ContainsSubstring("num_thresholds"));
    REQUIRE_THROWS_WITH(parse("bg_update_weight = 1.5\n"), ContainsSubstring("bg_update_weight"));
    REQUIRE_THROWS_WITH(parse("H = 0\n"), ContainsSubstring("H, W, T, s"));
    REQUIRE_THROWS_WITH(parse("blur_sigma = 0\n"), ContainsSubstring("blur_sigma"));
}

TEST_CASE("explicit threshold lists parse and validate") {
    Config c = parse("thresholds = 0, 0.1, 0.25, 1\n");
    REQUIRE(c.thresholds.has_value());
    REQUIRE(*c.thresholds == std::vector<double>{0.0, 0.1, 0.25, 1.0});
    REQUIRE_THROWS_AS(parse("thresholds = 0.1,, 0.2\n"), std::invalid_argument);
    REQUIRE_THROWS_WITH(parse("thresholds = -1\n"), ContainsSubstring("thresholds"));
}

TEST_CASE("exemplar threshold defaults scale with the feature dimension") {
    Config c;
    // fg features have H*W*T entries; flow features twice that.
    REQUIRE(c.effective_exemplar_threshold(FeatureKind::FgMask) == 0.5 * 80.0 * 0.1);
    REQUIRE(c.effective_exemplar_threshold(FeatureKind::Flow) == 0.05 * 2.0 * 6400.0);
    c.exemplar_threshold = 2.5;
    REQUIRE(c.effective_exemplar_threshold(FeatureKind::FgMask) == 2.5);
    REQUIRE(c.effective_exemplar_threshold(FeatureKind::Flow) == 2.5);
}

TEST_CASE("feature kind names round trip") {
    REQUIRE(to_string(FeatureKind::FgMask) == "fg");
    REQUIRE(to_string(FeatureKind::Flow) == "flow");
    REQUIRE(feature_kind_from_string("fg") == FeatureKind::FgMask);
    REQUIRE(feature_kind_from_string("flow") == FeatureKind::Flow);
    REQUIRE_THROWS_AS(feature_kind_from_string("sift"), std::invalid_argument);
}

TEST_CASE("config text writer round trips random valid configs exactly") {
    std::mt19937 rng(37);
    std::uniform_int_distribution<int> dim(1, 64);
    std::uniform_real_distribution<double> unit(0.01, 1.0);
    std::uniform_real_distribution<double> wide(0.0, 50.0);
    std::bernoulli_distribution coin(0.5);
    for (int trial = 0; trial < 200; ++trial) {
        Config c;
        c.H = dim(rng);
        c.W = dim(rng);
        c.T = dim(rng);
        c.s = dim(rng);
        c.alpha = unit(rng);
        c.beta = unit(rng);
        c.blur_sigma = unit(rng) * 10.0;
        c.fg_threshold = wide(rng);
        if (coin(rng)) c.exemplar_threshold = wide(rng);
        c.bg_init_frames = dim(rng);
        c.bg_update_weight = unit(rng);
        c.connectivity = coin(rng) ? 4 : 8;
        c.flow_block = dim(rng);
        c.flow_radius = dim(rng);
        c.num_thresholds = 2 + dim(rng);
        if (coin(rng)) {
            std::vector<double> ts;
            for (int i = 0; i < 3; ++i) ts.push_back(wide(rng));
            c.thresholds = ts;
        }
        c.validate();

        std::ostringstream out;
        write_config_text(c, out);
        std::istringstream in(out.str());
        REQUIRE(parse_config_text(in) == c);
    }
}
