#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "jst/io.hpp"

using namespace jst;

namespace {

const char* kFullConfig = R"({
  "n_servers": 3,
  "lambda_per_server": 0.1,
  "dist": {"x_m": 1.0, "x_M": 10.0, "p_small": 0.9},
  "profile": {"family": "NoFalseSmall", "a": 3.0, "pmm0": 0.45},
  "cost_fn": {"kind": "identity"},
  "sweep": {"max": 2.5, "points": 40, "spacing": "hybrid"},
  "sim": {"jobs": 100000, "warmup": 5000, "seed": 7, "replications": 5},
  "design": {"gamma": 10.0, "tau": 0.5},
  "output": {"csv": "out.csv", "svg": "out.svg"}
})";

const char* kRhoPareto = R"({
  "n_servers": 100,
  "rho": 0.8,
  "dist": {"pareto": {"alpha": 1.0, "beta": 0.5, "x_m": 1.0, "x_M": 10000.0}},
  "profile": {"family": "ExponentialSaturating", "a": 10.0, "b": 1.0}
})";

}  // namespace

TEST_CASE("full config parses") {
    ParseResult r = parse_experiment_config(kFullConfig);
    REQUIRE(r.ok());
    const ExperimentConfig& c = r.config;
    CHECK(c.system.n_servers == 3);
    CHECK(c.system.lambda_per_server == doctest::Approx(0.1));
    CHECK(c.lambda_given);
    CHECK_FALSE(c.rho_given);
    CHECK(c.system.dist.small_size == 1.0);
    CHECK(c.system.profile.family == ProfileFamily::NoFalseSmall);
    CHECK(c.system.profile.rate_small == 3.0);
    CHECK(c.system.profile.diag_small0 == 0.45);
    CHECK(c.profile_pmm0_given);
    CHECK_FALSE(c.profile_pMM0_given);
    CHECK(c.sweep.max == 2.5);
    CHECK(c.sweep.points == 40);
    CHECK(c.sim.jobs == 100000);
    CHECK(c.design.tau == 0.5);
    CHECK(c.output.csv == std::string("out.csv"));
}

TEST_CASE("rho plus pareto tail parses") {
    ParseResult r = parse_experiment_config(kRhoPareto);
    REQUIRE(r.ok());
    const ExperimentConfig& c = r.config;
    CHECK(c.rho_given);
    CHECK(c.pareto_given);
    CHECK(c.system.dist.p_small == doctest::Approx(0.99).epsilon(1e-14));
    CHECK(c.system.dist.has_tail());
    // rho fixes lambda through the mean size
    CHECK(c.system.lambda_per_server ==
          doctest::Approx(0.8 / c.system.dist.mean()).epsilon(1e-13));
    CHECK(c.system.load() == doctest::Approx(0.8).epsilon(1e-12));
    // defaults
    CHECK(c.sweep_points_or_default() == 400);
    CHECK(c.gamma_or_default() == 10.0);
    CHECK(c.sweep_max_or_default() ==
          doctest::Approx(0.9 / c.system.total_arrival_rate()).epsilon(1e-12));
}

TEST_CASE("serialization round-trips the document") {
    for (const char* doc : {kFullConfig, kRhoPareto}) {
        ParseResult r = parse_experiment_config(doc);
        REQUIRE(r.ok());
        std::string out = serialize_experiment_config(r.config);
        CHECK(nlohmann::json::parse(out) == nlohmann::json::parse(doc));
        // and the serialized form parses back to the same document again
        ParseResult r2 = parse_experiment_config(out);
        REQUIRE(r2.ok());
        CHECK(serialize_experiment_config(r2.config) == out);
    }
}

TEST_CASE("malformed configs are rejected with a message") {
    auto expect_malformed = [](const std::string& doc) {
        ParseResult r = parse_experiment_config(doc);
        CHECK(r.error == ConfigError::Malformed);
        CHECK_FALSE(r.message.empty());
    };
    expect_malformed("{ not json");
    expect_malformed(R"({"n_servers": 3})");  // missing dist/profile/rate
    // both rate forms at once
    expect_malformed(R"({"n_servers": 3, "rho": 0.5, "lambda_per_server": 0.1,
        "dist": {"x_m": 1, "x_M": 10, "p_small": 0.9},
        "profile": {"family": "PerfectKnowledge"}})");
    // neither rate form
    expect_malformed(R"({"n_servers": 3,
        "dist": {"x_m": 1, "x_M": 10, "p_small": 0.9},
        "profile": {"family": "PerfectKnowledge"}})");
    // unknown top-level key
    expect_malformed(R"({"n_servers": 3, "rho": 0.5, "bogus": 1,
        "dist": {"x_m": 1, "x_M": 10, "p_small": 0.9},
        "profile": {"family": "PerfectKnowledge"}})");
    // unknown nested key
    expect_malformed(R"({"n_servers": 3, "rho": 0.5,
        "dist": {"x_m": 1, "x_M": 10, "p_small": 0.9, "extra": 2},
        "profile": {"family": "PerfectKnowledge"}})");
    // unknown family
    expect_malformed(R"({"n_servers": 3, "rho": 0.5,
        "dist": {"x_m": 1, "x_M": 10, "p_small": 0.9},
        "profile": {"family": "Psychic"}})");
    // scaled cost without kappa
    expect_malformed(R"({"n_servers": 3, "rho": 0.5,
        "dist": {"x_m": 1, "x_M": 10, "p_small": 0.9},
        "profile": {"family": "PerfectKnowledge"},
        "cost_fn": {"kind": "scaled"}})");
    // pmm0 above the small-class mass
    expect_malformed(R"({"n_servers": 3, "rho": 0.5,
        "dist": {"x_m": 1, "x_M": 10, "p_small": 0.9},
        "profile": {"family": "ExponentialSaturating", "pmm0": 0.95}})");
}

TEST_CASE("overloaded config is typed as unstable, not malformed") {
    ParseResult r = parse_experiment_config(R"({
        "n_servers": 3, "rho": 1.2,
        "dist": {"x_m": 1, "x_M": 10, "p_small": 0.9},
        "profile": {"family": "PerfectKnowledge"}})");
    CHECK(r.error == ConfigError::Unstable);
    CHECK(r.message.find("load") != std::string::npos);

    ParseResult r2 = parse_experiment_config(R"({
        "n_servers": 3, "lambda_per_server": 0.6,
        "dist": {"x_m": 1, "x_M": 10, "p_small": 0.9},
        "profile": {"family": "PerfectKnowledge"}})");
    CHECK(r2.error == ConfigError::Unstable);
}

TEST_CASE("csv format is pinned") {
    CsvWriter w("unused.csv");
    w.metadata("n=3 lambda=0.1");
    w.header({"sigma", "value"});
    w.row({0.0, 0.254673650282031});
    w.row({1.0 / 3.0, 1e-12});
    w.row_mixed({"0.5", "marker"});
    const std::string& t = w.text();
    CHECK(t == "# n=3 lambda=0.1\n"
               "sigma,value\n"
               "0,0.254673650282\n"
               "0.333333333333,1e-12\n"
               "0.5,marker\n");
    CHECK(t.find('\r') == std::string::npos);

    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(565.0) == "565");
    CHECK(format_number(0.00909090909090909) == "0.00909090909091");
}

TEST_CASE("csv writer writes the file") {
    std::string path = "test_io_out.csv";
    CsvWriter w(path);
    w.header({"a", "b"});
    w.row({1, 2});
    w.write();
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == "a,b\n1,2\n");
    in.close();
    std::remove(path.c_str());
}

TEST_CASE("svg chart is self-contained") {
    std::string path = "test_io_chart.svg";
    SvgSeries s1;
    s1.label = "rho=0.8";
    s1.points = {{1e2, 0.9}, {1e3, 0.7}, {1e4, 0.5}};
    SvgSeries s2;
    s2.label = "rho=0.9 <tight&hot>";
    s2.points = {{1e2, 0.8}, {1e3, 0.6}, {1e4, 0.4}};
    write_svg_chart(path, "efficiency vs x_M", "x_M", "E", {s1, s2}, true);
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    std::string svg = ss.str();
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") == svg.size() - std::string("</svg>\n").size());
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK(svg.find("rho=0.8") != std::string::npos);
    // labels are escaped, never raw
    CHECK(svg.find("<tight&hot>") == std::string::npos);
    CHECK(svg.find("&lt;tight&amp;hot&gt;") != std::string::npos);
    // no external references
    CHECK((svg.find("http://") == std::string::npos ||
           svg.find("http://www.w3.org") != std::string::npos));
    CHECK(svg.find("href") == std::string::npos);
    in.close();
    std::remove(path.c_str());
}
