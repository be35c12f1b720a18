#include <doctest.h>

#include <json.hpp>

#include "bpwa/reports.hpp"

using namespace bpwa;

TEST_CASE("grid parsing") {
    const Grid1D g = Grid1D::parse("0.2..0.5:0.1");
    const auto v = g.values();
    REQUIRE(v.size() == 4);
    CHECK(v[3] == 0.5);
    CHECK(v[1] == 0.3);
    CHECK(Grid1D::parse(g.str()).values() == v);
    CHECK(Grid1D::parse("0.62").values() == std::vector<double>{0.62});
    CHECK_THROWS_AS(Grid1D::parse("1..0:0.1"), InputError);
    CHECK_THROWS_AS(Grid1D::parse("0..1:0"), InputError);
    CHECK_THROWS_AS(Grid1D::parse("0..1"), InputError);
    CHECK_THROWS_AS(Grid1D::parse("abc"), InputError);
}

TEST_CASE("config loading and overrides") {
    const RunConfig c = load_config({{"gamma", "30"}, {"omega", "0.5..0.7:0.1"}}, {{"gamma", "90"}, {"fold", "legacy"}});
    CHECK(c.params.gamma == 90.0);
    CHECK(c.options.fold == FoldPolynomial::Legacy);
    CHECK(c.omega.values().size() == 3);
    CHECK_THROWS_AS(load_config({{"gamm", "30"}}), InputError);
    CHECK_THROWS_AS(load_config({{"gamma", "-1"}}), InputError);
    CHECK_THROWS_AS(load_config({{"xi", "weird"}}), InputError);
    CHECK_THROWS_AS(load_config({{"verify", "2"}}), InputError);
    CHECK_THROWS_AS(load_config_file("/nonexistent/cfg.txt"), InputError);
}

TEST_CASE("canonical settings and hash") {
    const RunConfig a = load_config({}), b = load_config({{"delta2", "0.13"}});
    CHECK(a.canonical() == b.canonical());
    CHECK(a.hash() == b.hash());
    CHECK(a.hash() != load_config({{"delta2", "0.14"}}).hash());
    CHECK(a.canonical().find("gamma=50") != std::string::npos);
}

TEST_CASE("region from flags") {
    CHECK(region_from_flags({true, false, false}) == Region::Br);
    CHECK(region_from_flags({false, false, false}) == Region::CH);
    CHECK(region_from_flags({false, false, true}) == Region::BL);
    CHECK(region_from_flags({false, true, true}) == Region::BL_CH);
    CHECK(region_from_flags({true, false, true}) == Region::CH_BL_Bn);
    CHECK(region_from_flags({false, true, false}) == Region::nT_CH);
    CHECK(has_bl(Region::BL_CH));
    CHECK(!has_bl(Region::nT_CH));
    CHECK(region_admits(Region::Br, ResponseLabel::P1Intra));
    CHECK(!region_admits(Region::Br, ResponseLabel::Chaotic));
    CHECK(region_admits(Region::BL, ResponseLabel::P1InterSymmetric));
}

TEST_CASE("small design map: zero-amplitude row, serial equals parallel") {
    RunConfig cfg = load_config({{"omega", "0.5..1.5:0.25"}, {"amp", "0..0.1:0.05"}});
    const DesignMap s = build_design_map(cfg, Execution::Serial);
    const DesignMap p = build_design_map(cfg, Execution::Parallel);
    REQUIRE(s.cells.size() == 15);
    for (std::size_t j = 0; j < s.omegas.size(); ++j) CHECK(s.at(0, j).region == Region::Br);
    CHECK(design_map_csv(s) == design_map_csv(p));
    CHECK(locus_csv(s.loci) == locus_csv(p.loci));
    CHECK(bandwidth_csv(s) == bandwidth_csv(p));
    CHECK(critical_csv(s.critical) == critical_csv(p.critical));
    CHECK(design_map_csv(s).rfind("A_over_R,Omega,region,verified,numeric_label,agrees\n", 0) == 0);
    CHECK(bandwidth_csv(s).rfind("A_over_R,exists,Omega_lo,Omega_hi,width\n", 0) == 0);
    CHECK(critical_csv(s.critical).rfind("name,A_over_R\n", 0) == 0);
    REQUIRE(s.loci.size() == 6);
    CHECK(s.loci[0].kind == LocusKind::Cf1);
    CHECK(s.loci[5].kind == LocusKind::SB2);
}

TEST_CASE("verification marks the requested share of cells") {
    RunConfig cfg = load_config({{"omega", "1.4..1.6:0.1"}, {"amp", "0.01"}, {"verify", "1"}});
    cfg.sim.discard_periods = 40;
    cfg.sim.window_periods = 16;
    const DesignMap map = build_design_map(cfg, Execution::Serial);
    CHECK(map.verified == 3);
    CHECK(map.agreed == 3);
    for (const auto& c : map.cells) {
        CHECK(c.verified);
        CHECK(c.numeric == ResponseLabel::P1Intra);
    }
}

TEST_CASE("power map") {
    const Model m;
    SimOptions o;
    o.discard_periods = 40;
    o.window_periods = 16;
    const std::vector<double> W{1.4, 1.6}, A{0.0, 0.02};
    const auto cells = power_map(m, W, A, o, Execution::Serial);
    REQUIRE(cells.size() == 4);
    CHECK(*cells[0].power == 0.0);
    CHECK(*cells[2].power > 0.0);
    const auto par = power_map(m, W, A, o, Execution::Parallel);
    CHECK(power_map_csv(m, cells) == power_map_csv(m, par));
    CHECK(power_map_csv(m, cells).rfind("A_over_R,Omega,P_avg,CWR,label\n", 0) == 0);
}

TEST_CASE("manifest json") {
    Manifest mf;
    mf.command = "loci";
    mf.config_canonical = "gamma=50\n";
    mf.config_hash = "abc";
    mf.timings = {{"loci", 0.5}};
    mf.artifacts = {{"loci.csv", "0123"}};
    const auto j = nlohmann::json::parse(manifest_json(mf));
    CHECK(j["command"] == "loci");
    CHECK(j["config_hash"] == "abc");
    CHECK(j["artifacts"]["loci.csv"] == "0123");
    CHECK(j.contains("version"));
    CHECK(j.contains("compiler"));
}

TEST_CASE("worker count honours the environment") {
    CHECK(worker_count() >= 1);
    std::vector<int> out(100, 0);
    for_each_cell(Execution::Parallel, out.size(), [&](std::size_t i) { out[i] = int(i) * 2; });
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == int(i) * 2);
    CHECK_THROWS_AS(for_each_cell(Execution::Parallel, 10,
                                  [](std::size_t i) {
                                      if (i >= 3) throw InputError("cell " + std::to_string(i));
                                  }),
                    InputError);
}
