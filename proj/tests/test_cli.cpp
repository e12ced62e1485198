#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qtl/qtl.hpp"

using namespace qtl;
namespace fs = std::filesystem;

namespace {

Json fig2_json() {
    std::ifstream in(std::string(QTL_SOURCE_DIR) + "/configs/fig2.json");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_json_text(buf.str(), "fig2.json");
}

std::string error_of(const Json& j) {
    try {
        parse_config(j);
    } catch (const ConfigInvalid& e) {
        return e.what();
    }
    return "";
}

/// Messages read "ConfigInvalid: <field path>: <reason>".
bool names_field(const std::string& msg, const std::string& field) {
    return msg.rfind("ConfigInvalid: " + field, 0) == 0;
}

/// Small, fast variant of the default risk-curve config.
ExperimentConfig quick_config() {
    ExperimentConfig cfg = preset_config("fig2");
    cfg.grid_resolution = 6;
    cfg.bins = 30;
    cfg.source.gaussian.bins = cfg.target->gaussian.bins = 30;
    cfg.n_source = {0, 10};
    cfg.n_target = {2, 8};
    cfg.replications = 15;
    cfg.rademacher.outer = 4;
    cfg.rademacher.sigma_draws = 20;
    return cfg;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST(Config, PresetsEqualTheShippedFiles) {
    for (const char* name : {"fig2", "fig3"}) {
        const ExperimentConfig file = load_config(std::string(QTL_SOURCE_DIR) + "/configs/" + name + ".json");
        EXPECT_EQ(config_to_json(preset_config(name)), config_to_json(file)) << name;
    }
    EXPECT_THROW(preset_config("fig4"), ConfigInvalid);
}

TEST(Config, RoundTripsThroughJson) {
    const ExperimentConfig a = preset_config("fig3");
    Json j = config_to_json(a);
    EXPECT_EQ(config_to_json(parse_config(j)), j);
}

TEST(Config, ErrorsNameTheField) {
    Json j = fig2_json();
    j["bound"]["delta"] = 1.5;
    EXPECT_TRUE(names_field(error_of(j), "bound.delta")) << error_of(j);

    j = fig2_json();
    j["grid"]["colour"] = 1;
    EXPECT_EQ(error_of(j), "ConfigInvalid: grid.colour: unknown key");

    j = fig2_json();
    j["n_target"][2] = -3;
    EXPECT_TRUE(names_field(error_of(j), "n_target[2]")) << error_of(j);

    j = fig2_json();
    j["schema"] = 2;
    EXPECT_TRUE(names_field(error_of(j), "schema")) << error_of(j);

    j = fig2_json();
    j.erase("master_seed");
    EXPECT_TRUE(names_field(error_of(j), "master_seed")) << error_of(j);

    j = fig2_json();
    j["grid"]["resolution"] = 1000;
    EXPECT_TRUE(names_field(error_of(j), "grid.resolution")) << error_of(j);

    j = fig2_json();
    j["bound"]["r_mode"] = "guess";
    EXPECT_TRUE(names_field(error_of(j), "bound.r_mode")) << error_of(j);

    EXPECT_THROW(parse_json_text("{\"schema\": 1,", "inline"), ConfigInvalid);
    EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigInvalid);
}

TEST(Csv, HeadersAreFixed) {
    EXPECT_EQ((CsvTable{risk_curve_header(), {}}).str(),
              "n_source,n_target,replications,median,q25,q75,excess_raw_mean,bound_value,complexity_term,"
              "confidence_term,dissimilarity_term,source_complexity_term,source_confidence_term\r\n");
    EXPECT_EQ((CsvTable{shift_sweep_header(), {}}).str(), "shift,median,q25,q75,bound_value,dst_trace,dst_tv\r\n");
    EXPECT_EQ((CsvTable{bounds_header(), {}}).str(),
              "n_source,n_target,mi_sup_source,mi_sup_target,cap_mi,cap_dim,r_povm_mc,r_joint_mc,dst_trace,dst_tv,"
              "bound_no_transfer,bound_transfer\r\n");
}

TEST(Csv, EscapingAndRoundTrip) {
    EXPECT_EQ(csv_escape("plain"), "plain");
    EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
    CsvTable t;
    t.header = {"name", "value"};
    t.rows = {{"x,y", "1"}, {"line\nbreak", "2.5"}, {"", "-3e-07"}};
    const CsvTable back = parse_csv(t.str());
    EXPECT_EQ(back.header, t.header);
    EXPECT_EQ(back.rows, t.rows);
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
}

TEST(Svg, RendersFromCsv) {
    CsvTable t;
    t.header = risk_curve_header();
    t.add_row({0, 2, 10, 0.1, 0.05, 0.2, 0.11, 3.0, 1, 1, 0, 0, 0});
    t.add_row({0, 4, 10, 0.05, 0.02, 0.1, 0.06, 2.0, 1, 1, 0, 0, 0});
    const std::string svg = risk_curve_svg(t.str());
    EXPECT_NE(svg.find("<svg"), std::string::npos);
    EXPECT_NE(svg.find("N_S = 0"), std::string::npos);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(RiskCurve, DeterministicTable) {
    const ExperimentConfig cfg = quick_config();
    const auto a = run_risk_curve(cfg, 1), b = run_risk_curve(cfg, 2);
    EXPECT_EQ(a.table.str(), b.table.str());
    EXPECT_EQ(a.per_replication.str(), b.per_replication.str());
    EXPECT_EQ(a.table.rows.size(), 4u);
    EXPECT_EQ(a.per_replication.rows.size(), 4u * 15u);
    for (double v : a.table.numbers("replications")) EXPECT_EQ(v, 15.0);
    // the no-transfer rows carry no dissimilarity term
    EXPECT_EQ(a.table.numbers("dissimilarity_term")[0], 0.0);
    EXPECT_GT(a.table.numbers("dissimilarity_term")[2], 0.0);
}

TEST(RiskCurve, SingleReplication) {
    ExperimentConfig cfg = quick_config();
    cfg.replications = 1;
    const auto r = run_risk_curve(cfg, 1);
    for (const auto& row : r.table.rows) {
        EXPECT_EQ(row[3], row[4]);
        EXPECT_EQ(row[3], row[5]);
    }
}

TEST(ShiftSweep, ZeroShiftHasNoDissimilarityAndRowsAreSorted) {
    ExperimentConfig cfg = preset_config("fig3");
    cfg.grid_resolution = 6;
    cfg.replications = 10;
    cfg.shifts = {0.5, 0.0, -0.5};
    const auto r = run_shift_sweep(cfg, 1);
    ASSERT_EQ(r.rows.size(), 3u);
    EXPECT_EQ(r.rows[0].shift, -0.5);
    EXPECT_EQ(r.rows[1].shift, 0.0);
    EXPECT_NEAR(r.rows[1].dst_trace, 0.0, 1e-12);
    EXPECT_NEAR(r.rows[1].dst_tv, 0.0, 1e-12);
    EXPECT_GT(r.rows[0].dst_trace, 0.0);
    EXPECT_LE(r.rows[0].dst_trace, r.rows[0].dst_tv + 1e-9);

    cfg.n_source = {0};
    EXPECT_THROW(run_shift_sweep(cfg, 1), ConfigInvalid);
}

TEST(Bounds, TableIsConsistent) {
    ExperimentConfig cfg = quick_config();
    cfg.target = cfg.source;
    cfg.n_source = {0, 10, 1000};
    const CsvTable t = run_bounds(cfg, 1);
    ASSERT_EQ(t.rows.size(), 6u);
    const auto d = t.numbers("dst_trace"), cap_mi = t.numbers("cap_mi"), cap_dim = t.numbers("cap_dim");
    const auto mc_p = t.numbers("r_povm_mc"), mc_j = t.numbers("r_joint_mc");
    const auto no = t.numbers("bound_no_transfer"), tr = t.numbers("bound_transfer");
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        EXPECT_NEAR(d[i], 0.0, 1e-12);
        EXPECT_GE(cap_mi[i], mc_p[i] - 0.1);
        EXPECT_GE(cap_dim[i], mc_j[i] - 0.1);
        EXPECT_GE(mc_j[i], mc_p[i] - 1e-12);
    }
    EXPECT_EQ(no[0], tr[0]);  // N_S = 0 reports the no-transfer bound
    EXPECT_GT(tr[2], tr[4]);  // more source data, smaller bound
    EXPECT_GT(tr[3], tr[5]);
}

TEST(Binary, RerunsAreByteIdenticalAndBadConfigsExitWithTwo) {
    const fs::path root = fs::temp_directory_path() / "qtl_cli_test";
    fs::remove_all(root);
    fs::create_directories(root);
    Json j = config_to_json(quick_config());
    {
        std::ofstream(root / "quick.json") << j.dump(2);
    }
    const std::string cli = QTL_CLI_PATH;
    for (const char* run : {"a", "b"}) {
        const std::string cmd = cli + " risk-curve --config " + (root / "quick.json").string() + " --out " +
                                (root / run).string() + " --threads 1 > /dev/null";
        ASSERT_EQ(std::system(cmd.c_str()), 0) << cmd;
    }
    EXPECT_EQ(slurp(root / "a" / "risk_curve.csv"), slurp(root / "b" / "risk_curve.csv"));
    EXPECT_EQ(slurp(root / "a" / "risk_curve.svg"), slurp(root / "b" / "risk_curve.svg"));
    EXPECT_TRUE(fs::exists(root / "a" / "run_meta.json"));

    j["replications"] = 0;
    {
        std::ofstream(root / "bad.json") << j.dump(2);
    }
    const std::string bad = cli + " risk-curve --config " + (root / "bad.json").string() + " > /dev/null 2>&1";
    const int status = std::system(bad.c_str());
    ASSERT_TRUE(WIFEXITED(status));
    EXPECT_EQ(WEXITSTATUS(status), 2);
    fs::remove_all(root);
}
