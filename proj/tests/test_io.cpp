#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "vsir/io.hpp"
#include "vsir/svg.hpp"

using namespace vsir;

TEST(Fmt, RoundTrips)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 2000; ++i) {
        const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        EXPECT_EQ(std::strtod(fmt(v).c_str(), nullptr), v);
    }
    EXPECT_EQ(fmt(0.1), "0.1");
    EXPECT_EQ(fmt(1.0), "1");
    EXPECT_EQ(fmt(1.0 / 3.0), "0.3333333333333333");
}

TEST(Params, KeyValue)
{
    const ModelParams P = parse_params("# reference\nA = 1.1\nbeta=1.3\n m = 0.35 # mortality\nmu = 0.2\nd = 0.15\ng = 0.35\np = 0.5\n");
    EXPECT_EQ(P.A, 1.1);
    EXPECT_EQ(P.beta, 1.3);
    EXPECT_EQ(P.m, 0.35);
    EXPECT_EQ(P.p, 0.5);
}

TEST(Params, KeyValueErrors)
{
    const std::string ok = "A = 1.1\nbeta = 1.3\nm = 0.35\nmu = 0.2\nd = 0.15\ng = 0.35\n";
    EXPECT_THROW(parse_params(ok), validation_error);
    EXPECT_THROW(parse_params(ok + "p = 0.5\np = 0.4\n"), validation_error);
    EXPECT_THROW(parse_params(ok + "p = 0.5\nq = 1\n"), validation_error);
    EXPECT_THROW(parse_params(ok + "p = 0.5x\n"), validation_error);
    EXPECT_THROW(parse_params(ok + "p 0.5\n"), validation_error);
    EXPECT_THROW(parse_params(ok + "p = -0.5\n"), validation_error);
}

TEST(Params, Json)
{
    const ModelParams P = parse_params(R"({"A":1,"beta":1.3,"m":0.35,"mu":0.25,"d":0.25,"g":0.5,"p":0.6})");
    EXPECT_EQ(P.g, 0.5);
    EXPECT_THROW(parse_params(R"({"A":1,"beta":"x","m":0.35,"mu":0.25,"d":0.25,"g":0.5,"p":0.6})"), validation_error);
    EXPECT_THROW(parse_params(R"({"A":1,)"), validation_error);
    EXPECT_THROW(params_from_json(json::array()), validation_error);
}

TEST(Params, RoundTrip)
{
    ModelParams P = reference_params();
    P.p = 0.1 + 0.2;
    const ModelParams a = parse_params(to_kv(P));
    const ModelParams b = parse_params(to_json(P).dump());
    for (const ModelParams& Q : {a, b}) {
        EXPECT_EQ(Q.A, P.A);
        EXPECT_EQ(Q.beta, P.beta);
        EXPECT_EQ(Q.m, P.m);
        EXPECT_EQ(Q.mu, P.mu);
        EXPECT_EQ(Q.d, P.d);
        EXPECT_EQ(Q.g, P.g);
        EXPECT_EQ(Q.p, P.p);
    }
}

TEST(HetCsv, RoundTrip)
{
    std::vector<HetRow> rows(3);
    rows[0] = {2.2, 0.1 + 0.2, 1e-9, true, ""};
    rows[1] = {2.4, 0, 0, false, "no crossing"};
    rows[2] = {2.6, 0.453994, 2e-10, true, ""};
    const std::string text = "# vsir\n" + het_table_csv(rows);
    const auto pts = parse_het_table_csv(text);
    ASSERT_EQ(pts.size(), 2u);
    EXPECT_EQ(pts[0].p, 0.1 + 0.2);
    EXPECT_EQ(pts[1].r0, 2.6);
    EXPECT_NE(het_table_csv(rows).find("2.4,nan,nan"), std::string::npos);
}

TEST(HetCsv, Errors)
{
    EXPECT_THROW(parse_het_table_csv(""), validation_error);
    EXPECT_THROW(parse_het_table_csv("x,y\n1,2\n"), validation_error);
    EXPECT_THROW(parse_het_table_csv("r0,p_het\n1\n"), validation_error);
    EXPECT_THROW(parse_het_table_csv("r0,p_het\n1,abc\n"), validation_error);
    EXPECT_EQ(parse_het_table_csv("r0,p_het\n2.5,0.4\n").size(), 1u);
}

TEST(TrajectoryIo, CsvAndJson)
{
    Trajectory tr;
    tr.samples.push_back({0.0, {0.5, 0.1}, {}});
    tr.samples.push_back({0.25, {0.45, 0.125}, {}});
    tr.terminal.kind = TerminalKind::time_horizon;
    EXPECT_EQ(trajectory_csv(tr), "t,S,I\n0,0.5,0.1\n0.25,0.45,0.125\n");
    const json j = to_json(tr);
    EXPECT_EQ(j["S"].size(), 2u);
    EXPECT_EQ(j["terminal"]["kind"], to_string(TerminalKind::time_horizon));
    EXPECT_FALSE(to_json(tr, false).contains("t"));
    std::vector<RecoveredSample> R(1);
    EXPECT_THROW(trajectory_csv(tr, &R), validation_error);
}

TEST(Preamble, Format)
{
    const std::string s = csv_preamble(json{{"tol", 1e-10}});
    EXPECT_EQ(s, std::string("# vsir ") + version + "\n# config: {\"tol\":1e-10}\n");
}

TEST(Svg, DeterministicAndEscaped)
{
    auto draw = [] {
        svg::Plot pl(0, 1, 0, 1);
        pl.polyline({{0, 0}, {0.5, 0.25}, {1, 1}}, {svg::color(1), 1.5, "4 2", "none"});
        pl.circle(0.5, 0.5, 3);
        pl.text(0.1, 0.9, "a<b & c");
        pl.title("E & F");
        pl.labels("R0", "p");
        pl.comment("x -- y");
        return pl.str();
    };
    const std::string a = draw();
    EXPECT_EQ(a, draw());
    EXPECT_NE(a.find("a&lt;b &amp; c"), std::string::npos);
    EXPECT_EQ(a.find("x -- y"), std::string::npos);
    EXPECT_EQ(a.rfind("<?xml", 0), 0u);
    EXPECT_NE(a.find("</svg>"), std::string::npos);
    EXPECT_EQ(svg::num(1.0 / 3.0), "0.33");
}
