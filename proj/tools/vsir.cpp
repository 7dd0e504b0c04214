// vsir command line front end.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "vsir.hpp"

namespace fs = std::filesystem;
using namespace vsir;

namespace {

const char* schema_help = R"(CSV schemas (every file starts with '# vsir <version>' and '# config: <json>'):
  equilibria   id,S,I,eig1_re,eig1_im,eig2_re,eig2_im,class
  atlas        curves.csv   r0,p_sn,p_t,p_h,p_bt2,p_het   (empty cell: curve undefined at r0)
               regions.csv  r0,p,label                    (label A..H or boundary)
  portraits    portraits.csv region,run,t,S,I         (run: fan index, or cycle/inside/outside in E)
  simulate     trajectory.csv t,S,I[,R]
  het-table    het_table.csv r0,p_het,splitting_residual  (nan on a failed row)
  het-fit      het_fit.csv   r0,p,p_fit,residual
  cycle        cycle.csv     t,S,I                        (one revolution)
  dz           dz.csv        quantity,value
Exit codes: 0 success, 2 validation error, 3 numerical failure.)";

struct Global {
    std::string params_file;
    std::string out;
    std::vector<std::string> formats;
    double tol = 1e-10;
    unsigned jobs = 1;
    std::string carrier = "transmission";
    std::optional<double> A, beta, m, mu, d, g, p, r0;
};

ModelParams resolve_params(const Global& G)
{
    ModelParams P = reference_params();
    if (!G.params_file.empty()) P = parse_params(read_file(G.params_file));
    if (G.A) P.A = *G.A;
    if (G.beta) P.beta = *G.beta;
    if (G.m) P.m = *G.m;
    if (G.mu) P.mu = *G.mu;
    if (G.d) P.d = *G.d;
    if (G.g) P.g = *G.g;
    if (G.p) P.p = *G.p;
    P.validate();
    if (G.r0) P = reduced_to_params({*G.r0, P.p, Base::from(P, parse_carrier(G.carrier))});
    return P;
}

/// Routes artifacts either into --out or, with no output directory, the primary one to stdout.
class Output {
public:
    Output(const Global& G, std::string command, std::vector<std::string> supported)
        : dir_(G.out), command_(std::move(command)), supported_(std::move(supported))
    {
        for (const auto& f : G.formats) {
            if (std::find(supported_.begin(), supported_.end(), f) == supported_.end()) {
                throw validation_error(command_ + " does not produce " + f + " output");
            }
            if (std::find(formats_.begin(), formats_.end(), f) == formats_.end()) formats_.push_back(f);
        }
        if (formats_.empty()) {
            if (dir_.empty()) formats_.push_back(supported_.front());
            else formats_ = supported_;
        }
        if (dir_.empty() && formats_.size() > 1) throw validation_error("several formats need --out DIR");
        if (!dir_.empty()) fs::create_directories(dir_);
    }

    bool wants(const std::string& f) const { return std::find(formats_.begin(), formats_.end(), f) != formats_.end(); }
    const std::vector<std::string>& formats() const { return formats_; }

    void emit(const std::string& file, const std::string& format, const std::string& content, bool primary)
    {
        if (!wants(format)) return;
        if (dir_.empty()) {
            if (primary) std::cout << content;
            return;
        }
        const fs::path path = fs::path(dir_) / file;
        write_file(path.string(), content);
        written_.push_back(path.string());
    }

    void summary(const std::string& text) const
    {
        if (dir_.empty()) return;
        std::cout << text;
        for (const auto& w : written_) std::cout << "wrote " << w << '\n';
    }

private:
    std::string dir_;
    std::string command_;
    std::vector<std::string> supported_;
    std::vector<std::string> formats_;
    std::vector<std::string> written_;
};

json run_config(const Global& G, const std::string& command, const Output& out, json options,
                std::optional<ModelParams> P = std::nullopt)
{
    json j;
    j["command"] = command;
    if (P) j["params"] = to_json(*P);
    j["carrier"] = G.carrier;
    j["tol"] = G.tol;
    j["formats"] = out.formats();
    j["out"] = G.out;
    j["options"] = std::move(options);
    return j;
}

json document(const json& config)
{
    return {{"vsir", version}, {"config", config}};
}

std::string svg_comment(const json& config)
{
    return std::string("vsir ") + version + " config: " + config.dump();
}

json eig_json(const Eigenvalues& e)
{
    return json::array({{{"re", e[0].real()}, {"im", e[0].imag()}}, {{"re", e[1].real()}, {"im", e[1].imag()}}});
}

std::string opt_cell(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

template <class F>
std::optional<double> try_curve(F f)
{
    try {
        return f();
    } catch (const curve_domain_error&) {
        return std::nullopt;
    }
}

std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return v;
}

HetCurve het_curve_for(const std::string& mode, const Base& base, double tol_p = 1e-6)
{
    if (mode == "fit") return published_het_curve();
    if (mode == "shoot") return shooting_het_curve(base, tol_p);
    throw validation_error("--het must be fit or shoot");
}

// ---------------------------------------------------------------- equilibria

int cmd_equilibria(const Global& G)
{
    const ModelParams P = resolve_params(G);
    Output out(G, "equilibria", {"csv", "json"});
    const json config = run_config(G, "equilibria", out, json::object(), P);
    const auto eqs = all_equilibria(P);
    const auto dfe = disease_free(P);

    std::ostringstream csv;
    csv << csv_preamble(config) << "id,S,I,eig1_re,eig1_im,eig2_re,eig2_im,class\n";
    for (const auto& e : eqs) {
        csv << to_string(e.id) << ',' << fmt(e.location.S) << ',' << fmt(e.location.I) << ','
            << fmt(e.eigenvalues[0].real()) << ',' << fmt(e.eigenvalues[0].imag()) << ','
            << fmt(e.eigenvalues[1].real()) << ',' << fmt(e.eigenvalues[1].imag()) << ',' << to_string(e.stability)
            << '\n';
    }
    json doc = document(config);
    doc["r0"] = r0_of(P);
    doc["equilibria"] = json::array();
    for (const auto& e : eqs) doc["equilibria"].push_back(to_json(e));
    doc["warnings"] = P.warnings();
    if (dfe.empty()) doc["note"] = "no disease-free equilibria";

    out.emit("equilibria.csv", "csv", csv.str(), true);
    out.emit("equilibria.json", "json", doc.dump(2) + "\n", true);

    std::ostringstream s;
    s << "R0 = " << fmt(r0_of(P)) << '\n';
    if (dfe.empty()) s << "no disease-free equilibria\n";
    for (const auto& e : eqs) {
        s << to_string(e.id) << " (" << fmt(e.location.S) << ", " << fmt(e.location.I) << ") " << to_string(e.stability)
          << '\n';
    }
    for (const auto& w : P.warnings()) std::cerr << "warning: " << w << '\n';
    out.summary(s.str());
    return 0;
}

// ---------------------------------------------------------------- atlas

struct AtlasOpts {
    double r0_min = 1.0, r0_max = 4.0, p_min = 0.0, p_max = 1.0;
    int nr = 200, np = 200, samples = 400;
    std::string het = "fit";
};

int cmd_atlas(const Global& G, const AtlasOpts& o)
{
    const ModelParams P = resolve_params(G);
    const Base base = Base::from(P, parse_carrier(G.carrier));
    if (!(o.r0_min > 0.0 && o.r0_max > o.r0_min && o.p_max > o.p_min && o.p_min >= 0.0)) {
        throw validation_error("atlas: need 0 < r0-min < r0-max and 0 <= p-min < p-max");
    }
    if (o.nr < 2 || o.np < 2 || o.samples < 2) throw validation_error("atlas: grid sizes must be at least 2");
    Output out(G, "atlas", {"csv", "json", "svg"});
    const json config = run_config(G, "atlas", out,
                                   {{"r0_min", o.r0_min}, {"r0_max", o.r0_max}, {"p_min", o.p_min}, {"p_max", o.p_max},
                                    {"nr", o.nr}, {"np", o.np}, {"samples", o.samples}, {"het", o.het}},
                                   P);

    const HetCurve raw = het_curve_for(o.het, base);
    const auto grid_r0 = linspace(o.r0_min, o.r0_max, o.nr);
    const auto curve_r0 = linspace(o.r0_min, o.r0_max, o.samples);

    // shooting is expensive: solve each abscissa once
    std::map<double, double> het_cache;
    if (o.het == "shoot") {
        std::vector<double> xs;
        for (double r : grid_r0) if (r > 2.0) xs.push_back(r);
        for (double r : curve_r0) if (r > 2.0) xs.push_back(r);
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        std::vector<double> vals(xs.size());
        parallel_for(xs.size(), G.jobs, [&](std::size_t i) { vals[i] = raw(xs[i]); });
        for (std::size_t i = 0; i < xs.size(); ++i) het_cache[xs[i]] = vals[i];
    }
    const HetCurve het{raw.name, [&](double r) {
                           const auto it = het_cache.find(r);
                           return it != het_cache.end() ? it->second : raw(r);
                       }};
    const CurveSet curves{base, het};

    std::ostringstream ccsv;
    ccsv << csv_preamble(config) << "r0,p_sn,p_t,p_h,p_bt2,p_het\n";
    for (double r : curve_r0) {
        ccsv << fmt(r) << ',' << fmt(p_sn(base)) << ',' << opt_cell(try_curve([&] { return p_t(base, r); })) << ','
             << opt_cell(try_curve([&] { return p_h(base, r); })) << ','
             << opt_cell(try_curve([&] { return p_bt2(base, r); })) << ','
             << opt_cell(try_curve([&] { return het(r); })) << '\n';
    }

    const auto grid_p = linspace(o.p_min, o.p_max, o.np);
    std::vector<RegionLabel> labels(grid_r0.size() * grid_p.size());
    parallel_for(grid_r0.size(), G.jobs, [&](std::size_t i) {
        for (std::size_t k = 0; k < grid_p.size(); ++k) labels[i * grid_p.size() + k] = classify_region(grid_r0[i], grid_p[k], curves);
    });
    std::ostringstream rcsv;
    rcsv << csv_preamble(config) << "r0,p,label\n";
    std::map<std::string, int> counts;
    std::map<std::string, std::pair<double, double>> centroid;
    for (std::size_t i = 0; i < grid_r0.size(); ++i) {
        for (std::size_t k = 0; k < grid_p.size(); ++k) {
            const std::string L = to_string(labels[i * grid_p.size() + k]);
            rcsv << fmt(grid_r0[i]) << ',' << fmt(grid_p[k]) << ',' << L << '\n';
            ++counts[L];
            centroid[L].first += grid_r0[i];
            centroid[L].second += grid_p[k];
        }
    }

    const DzCertificate dz = dz_point(base);
    json doc = document(config);
    doc["dz"] = {{"r0", dz.r0}, {"p", dz.p}, {"ok", dz.ok}};
    doc["het_curve"] = het.name;
    doc["label_counts"] = counts;

    svg::Plot plot(o.r0_min, o.r0_max, o.p_min, o.p_max, 720, 540);
    plot.title("(R0, p) bifurcation diagram");
    plot.labels("R0", "p");
    plot.comment(svg_comment(config));
    auto draw = [&](const char* name, std::size_t color, auto f, const std::string& dash = {}) {
        std::vector<std::pair<double, double>> pts;
        for (double r : curve_r0) {
            const auto v = try_curve([&] { return f(r); });
            if (v && *v >= o.p_min - 1.0) pts.emplace_back(r, *v);
            else if (pts.size() > 1) {
                plot.polyline(pts, {svg::color(color), 2.0, dash});
                pts.clear();
            } else {
                pts.clear();
            }
        }
        plot.polyline(pts, {svg::color(color), 2.0, dash});
        std::optional<std::pair<double, double>> anchor;
        for (double r : curve_r0) {
            const auto v = try_curve([&] { return f(r); });
            if (v && *v >= o.p_min && *v <= o.p_max) anchor = std::pair{r, *v};
        }
        if (anchor) plot.text(anchor->first, anchor->second, name, 12, svg::color(color));
    };
    draw("SN", 0, [&](double) { return p_sn(base); });
    draw("T", 1, [&](double r) { return p_t(base, r); });
    draw("H", 2, [&](double r) { return p_h(base, r); });
    draw("Bt", 3, [&](double r) { return p_bt2(base, r); }, "6,3");
    draw("Het", 4, [&](double r) { return het(r); }, "2,2");
    plot.circle(dz.r0, dz.p, 4.0, {"#000000", 1.0, {}, "#000000"});
    plot.text(dz.r0, dz.p, "  DZ");
    for (const auto& [L, c] : centroid) {
        if (L == "boundary") continue;
        plot.text(c.first / counts[L], c.second / counts[L], L, 16);
    }

    out.emit("regions.csv", "csv", rcsv.str(), true);
    out.emit("curves.csv", "csv", ccsv.str(), false);
    out.emit("atlas.json", "json", doc.dump(2) + "\n", true);
    out.emit("atlas.svg", "svg", plot.str(), true);
    std::ostringstream s;
    s << "DZ point (2, " << fmt(dz.p) << ")\n";
    for (const auto& [L, n] : counts) s << L << ": " << n << " cells\n";
    out.summary(s.str());
    return 0;
}

// ---------------------------------------------------------------- portraits

struct PortraitOpts {
    std::vector<std::string> regions{"A", "B", "C", "D", "E", "F", "G", "H"};
    std::size_t fan = 8;
    double horizon = 1000.0;
    std::string het = "shoot";
};

std::string portrait_svg(const Portrait& pt, const json& config)
{
    const ModelParams P = pt.preset.params();
    const double bound = invariant_region_bound(P);
    svg::Plot plot(0.0, P.A * 1.05, 0.0, bound * 1.05);
    plot.title(std::string("region ") + to_string(pt.preset.label) + "  R0=" + fmt(pt.preset.r0) + " p=" + fmt(pt.preset.p));
    plot.labels("S", "I");
    plot.comment(svg_comment(config));
    plot.polyline({{0.0, 0.0}, {P.A, 0.0}, {P.A, bound - P.A}, {0.0, bound}, {0.0, 0.0}}, {"#999999", 1.0, "4,4"});
    for (std::size_t i = 0; i < pt.runs.size(); ++i) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& s : pt.runs[i].trajectory.samples) pts.emplace_back(s.x.S, s.x.I);
        plot.polyline(pts, {svg::color(i), 1.0, {}, "none"});
        plot.circle(pt.runs[i].x0.S, pt.runs[i].x0.I, 2.5, {svg::color(i), 1.0, {}, svg::color(i)});
    }
    if (pt.cycle) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& s : pt.cycle->loop.samples) pts.emplace_back(s.x.S, s.x.I);
        plot.polyline(pts, {"#d62728", 3.0, {}, "none"});
    }
    for (const auto& e : pt.equilibria) {
        if (!e.exists()) continue;
        const bool filled = is_sink(e.stability);
        plot.circle(e.location.S, e.location.I, 5.0, {"#000000", 1.5, {}, filled ? "#000000" : "#ffffff"});
        plot.text(e.location.S, e.location.I + bound * 0.03, to_string(e.id));
    }
    return plot.str();
}

int cmd_portraits(const Global& G, const PortraitOpts& o)
{
    const R0Carrier carrier = parse_carrier(G.carrier);
    if (o.fan == 0) throw validation_error("portraits: --fan must be positive");
    Output out(G, "portraits", {"csv", "json", "svg"});
    const json config = run_config(G, "portraits", out,
                                   {{"regions", o.regions}, {"fan", o.fan}, {"horizon", o.horizon}, {"het", o.het}});
    std::vector<RegionLabel> labels;
    for (const auto& r : o.regions) labels.push_back(parse_region(r));

    const HetCurve ref_het = het_curve_for(o.het, reference_base(carrier));
    std::ostringstream csv;
    csv << csv_preamble(config) << "region,run,t,S,I\n";
    json doc = document(config);
    doc["regions"] = json::array();
    std::ostringstream s;
    bool first_svg = true;
    for (RegionLabel L : labels) {
        const RegionPreset pr = region_preset(L, ref_het, carrier);
        const CurveSet curves{pr.base, het_curve_for(o.het, pr.base)};
        PortraitOptions po;
        po.fan = o.fan;
        po.horizon = o.horizon;
        po.tol = G.tol;
        po.jobs = G.jobs;
        const Portrait pt = make_portrait(pr, curves, po);
        json r;
        r["label"] = to_string(L);
        r["classified_as"] = to_string(pt.info.label);
        r["r0"] = pr.r0;
        r["p"] = pr.p;
        r["params"] = to_json(pr.params());
        r["note"] = pr.note;
        r["equilibria"] = json::array();
        for (const auto& e : pt.equilibria) r["equilibria"].push_back(to_json(e));
        r["runs"] = json::array();
        for (std::size_t i = 0; i < pt.runs.size(); ++i) {
            const auto& run = pt.runs[i];
            r["runs"].push_back({{"x0", {run.x0.S, run.x0.I}},
                                 {"omega", to_string(run.omega)},
                                 {"final_I", run.final_I},
                                 {"t_end", run.trajectory.final_time()}});
            for (const auto& smp : run.trajectory.samples) {
                csv << to_string(L) << ',' << i << ',' << fmt(smp.t) << ',' << fmt(smp.x.S) << ',' << fmt(smp.x.I) << '\n';
            }
            if (run.omega == OmegaLimit::undecided) {
                std::cerr << "region " << to_string(L) << " run " << i << ": omega-limit undecided\n";
            }
        }
        auto rows = [&](const std::string& run, const Trajectory& tr) {
            for (const auto& smp : tr.samples) {
                csv << to_string(L) << ',' << run << ',' << fmt(smp.t) << ',' << fmt(smp.x.S) << ',' << fmt(smp.x.I) << '\n';
            }
        };
        if (pt.cycle) {
            rows("cycle", pt.cycle->loop);
            rows("inside", pt.inside->trajectory);
            rows("outside", pt.outside->trajectory);
            r["cycle"] = {{"period", pt.cycle->period},
                          {"floquet", pt.cycle->floquet},
                          {"section_point", {pt.cycle->section_point.S, pt.cycle->section_point.I}},
                          {"inside_start", to_string(pt.inside->omega)},
                          {"outside_start", to_string(pt.outside->omega)}};
        }
        doc["regions"].push_back(r);
        out.emit(std::string("portrait_") + to_string(L) + ".svg", "svg", portrait_svg(pt, config), first_svg);
        first_svg = false;
        s << "region " << to_string(L) << ": R0=" << fmt(pr.r0) << " p=" << fmt(pr.p) << " classified "
          << to_string(pt.info.label) << '\n';
    }
    out.emit("portraits.csv", "csv", csv.str(), true);
    out.emit("portraits.json", "json", doc.dump(2) + "\n", true);
    out.summary(s.str());
    return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateOpts {
    std::vector<double> x0{0.5, 0.1};
    double t_end = 100.0;
    bool reversed = false;
    bool with_R = false;
    double R_init = 0.0;
    bool stop_at_equilibrium = false;
};

int cmd_simulate(const Global& G, const SimulateOpts& o)
{
    const ModelParams P = resolve_params(G);
    if (o.x0.size() != 2) throw validation_error("simulate: --x0 takes S and I");
    if (o.with_R && o.reversed) throw validation_error("simulate: --with-R needs forward time");
    Output out(G, "simulate", {"csv", "json", "svg"});
    const json config = run_config(G, "simulate", out,
                                   {{"x0", o.x0}, {"t_end", o.t_end}, {"reversed", o.reversed}, {"with_R", o.with_R},
                                    {"R_init", o.R_init}, {"stop_at_equilibrium", o.stop_at_equilibrium}},
                                   P);
    IntegratorOptions io;
    io.tol = G.tol;
    io.reversed = o.reversed;
    Events ev;
    if (o.stop_at_equilibrium) ev.equilibria = admissible_targets(P);
    const Trajectory tr = integrate({o.x0[0], o.x0[1]}, P, o.t_end, io, ev);
    if (tr.terminal.kind == TerminalKind::step_failure) throw numerical_error("simulate: " + tr.terminal.detail);
    std::vector<RecoveredSample> R;
    if (o.with_R) R = recover_recovered(tr, o.R_init, P);

    json doc = document(config);
    doc["trajectory"] = to_json(tr);
    if (o.with_R) {
        json rs = json::array();
        for (const auto& r : R) rs.push_back(r.R);
        doc["trajectory"]["R"] = rs;
    }
    svg::Plot plot(0.0, P.A * 1.05, 0.0, invariant_region_bound(P) * 1.05);
    plot.title("trajectory");
    plot.labels("S", "I");
    plot.comment(svg_comment(config));
    std::vector<std::pair<double, double>> pts;
    for (const auto& s : tr.samples) pts.emplace_back(s.x.S, s.x.I);
    plot.polyline(pts, {svg::color(0), 1.5, {}, "none"});
    plot.circle(o.x0[0], o.x0[1], 3.0, {svg::color(0), 1.0, {}, svg::color(0)});

    out.emit("trajectory.csv", "csv", csv_preamble(config) + trajectory_csv(tr, o.with_R ? &R : nullptr), true);
    out.emit("trajectory.json", "json", doc.dump(2) + "\n", true);
    out.emit("trajectory.svg", "svg", plot.str(), true);
    std::ostringstream s;
    s << "terminal " << to_string(tr.terminal.kind) << " at t=" << fmt(tr.final_time()) << " x=(" << fmt(tr.final_state().S)
      << ", " << fmt(tr.final_state().I) << ")\n";
    out.summary(s.str());
    return 0;
}

// ---------------------------------------------------------------- heteroclinic

struct HetOpts {
    std::vector<double> r0_list;
    double tol_p = 1e-6;
    double offset = 1e-7;
    std::string table;
    bool shoot = false;
};

std::vector<double> published_abscissae()
{
    std::vector<double> v;
    for (const auto& t : published_het_table()) v.push_back(t.r0);
    return v;
}

std::optional<double> published_value(double r0)
{
    for (const auto& t : published_het_table()) {
        if (t.r0 == r0) return t.p;
    }
    return std::nullopt;
}

std::vector<HetRow> shoot_table(const Global& G, const Base& base, const HetOpts& o)
{
    ShootingOptions so;
    so.offset = o.offset;
    so.tol = std::min(G.tol, 1e-11);
    return build_het_table(o.r0_list.empty() ? published_abscissae() : o.r0_list, base, o.tol_p, so, G.jobs);
}

json rows_json(const std::vector<HetRow>& rows)
{
    json a = json::array();
    for (const auto& r : rows) {
        json j{{"r0", r.r0}, {"ok", r.ok}};
        if (r.ok) {
            j["p_het"] = r.p_het;
            j["splitting_residual"] = r.residual;
            if (const auto ref = published_value(r.r0)) {
                j["published_p"] = *ref;
                j["relative_delta"] = (r.p_het - *ref) / *ref;
            }
        } else {
            j["error"] = r.error;
        }
        a.push_back(j);
    }
    return a;
}

int cmd_het_table(const Global& G, const HetOpts& o)
{
    const ModelParams P = resolve_params(G);
    const Base base = Base::from(P, parse_carrier(G.carrier));
    Output out(G, "het-table", {"csv", "json"});
    const json config = run_config(G, "het-table", out,
                                   {{"r0_list", o.r0_list.empty() ? published_abscissae() : o.r0_list},
                                    {"tol_p", o.tol_p},
                                    {"offset", o.offset}},
                                   P);
    const auto rows = shoot_table(G, base, o);
    json doc = document(config);
    doc["rows"] = rows_json(rows);
    out.emit("het_table.csv", "csv", csv_preamble(config) + het_table_csv(rows), true);
    out.emit("het_table.json", "json", doc.dump(2) + "\n", true);
    std::ostringstream s;
    int failed = 0;
    for (const auto& r : rows) {
        if (!r.ok) {
            ++failed;
            std::cerr << "r0=" << fmt(r.r0) << ": " << r.error << '\n';
        }
    }
    s << rows.size() - failed << " of " << rows.size() << " rows solved\n";
    out.summary(s.str());
    return 0;
}

int cmd_het_fit(const Global& G, const HetOpts& o)
{
    if (o.shoot && !o.table.empty()) throw validation_error("het-fit: --table and --shoot are exclusive");
    const ModelParams P = resolve_params(G);
    Output out(G, "het-fit", {"json", "csv"});
    json opts{{"table", o.table.empty() ? (o.shoot ? "shooting" : "embedded") : o.table}, {"shoot", o.shoot}};
    if (o.shoot) {
        opts["r0_list"] = o.r0_list.empty() ? published_abscissae() : o.r0_list;
        opts["tol_p"] = o.tol_p;
        opts["offset"] = o.offset;
    }
    const json config = run_config(G, "het-fit", out, opts, o.shoot ? std::optional(P) : std::nullopt);

    std::vector<TablePoint> pts;
    json doc = document(config);
    if (o.shoot) {
        const auto rows = shoot_table(G, Base::from(P, parse_carrier(G.carrier)), o);
        for (const auto& r : rows) {
            if (r.ok) pts.push_back({r.r0, r.p_het});
        }
        doc["rows"] = rows_json(rows);
    } else if (!o.table.empty()) {
        pts = parse_het_table_csv(read_file(o.table));
    } else {
        pts = published_het_table();
    }
    const PowerFit f = fit_table(pts);
    doc["a"] = f.a;
    doc["b"] = f.b;
    doc["c"] = f.c;
    doc["rss"] = f.rss;
    doc["corr"] = f.corr;
    doc["pearson"] = f.pearson;
    doc["iterations"] = f.iterations;

    std::ostringstream csv;
    csv << csv_preamble(config) << "r0,p,p_fit,residual\n";
    for (const auto& t : pts) csv << fmt(t.r0) << ',' << fmt(t.p) << ',' << fmt(f(t.r0)) << ',' << fmt(t.p - f(t.r0)) << '\n';
    out.emit("het_fit.json", "json", doc.dump(2) + "\n", true);
    out.emit("het_fit.csv", "csv", csv.str(), true);
    std::ostringstream s;
    s << "p_het(R0) = " << fmt(f.a) << " R0^" << fmt(f.b) << " + " << fmt(f.c) << "  (R^2 = " << fmt(f.corr) << ")\n";
    out.summary(s.str());
    return 0;
}

// ---------------------------------------------------------------- cycle

int cmd_cycle(const Global& G, bool skip_het_check, double tol_p)
{
    const ModelParams P = resolve_params(G);
    const R0Carrier carrier = parse_carrier(G.carrier);
    const ReducedPoint q = params_to_reduced(P, carrier);
    Output out(G, "cycle", {"csv", "json", "svg"});
    const json config =
        run_config(G, "cycle", out, {{"r0", q.r0}, {"skip_het_check", skip_het_check}, {"tol_p", tol_p}}, P);
    PeriodicOptions po;
    po.tol = std::min(G.tol, 1e-12);
    if (!skip_het_check) {
        if (!(q.r0 > 2.0)) throw validation_error("cycle: not in region E (requires r0 > 2)");
        po.p_het = shooting_het_curve(q.base, tol_p)(q.r0);
    }
    const PeriodicOrbit orb = find_periodic_orbit(q.r0, q.p, q.base, po);

    json doc = document(config);
    doc["period"] = orb.period;
    doc["floquet"] = orb.floquet;
    doc["residual"] = orb.residual;
    doc["amplitude"] = orb.amplitude;
    doc["section_point"] = {orb.section_point.S, orb.section_point.I};
    doc["E2"] = {orb.center.S, orb.center.I};
    if (po.p_het) doc["p_het"] = *po.p_het;

    svg::Plot plot(0.0, P.A * 1.05, 0.0, invariant_region_bound(P) * 1.05);
    plot.title("unstable cycle, period " + fmt(orb.period));
    plot.labels("S", "I");
    plot.comment(svg_comment(config));
    std::vector<std::pair<double, double>> pts;
    for (const auto& s : orb.loop.samples) pts.emplace_back(s.x.S, s.x.I);
    plot.polyline(pts, {"#d62728", 2.0, {}, "none"});
    plot.circle(orb.center.S, orb.center.I, 4.0, {"#000000", 1.0, {}, "#000000"});

    out.emit("cycle.csv", "csv", csv_preamble(config) + trajectory_csv(orb.loop), true);
    out.emit("cycle.json", "json", doc.dump(2) + "\n", true);
    out.emit("cycle.svg", "svg", plot.str(), true);
    std::ostringstream s;
    s << "period " << fmt(orb.period) << ", Floquet multiplier " << fmt(orb.floquet) << '\n';
    out.summary(s.str());
    return 0;
}

// ---------------------------------------------------------------- dz

int cmd_dz(const Global& G)
{
    const ModelParams P = resolve_params(G);
    const Base base = Base::from(P, parse_carrier(G.carrier));
    Output out(G, "dz", {"json", "csv"});
    const json config = run_config(G, "dz", out, json::object(), P);
    const DzCertificate c = dz_point(base);
    json doc = document(config);
    doc["r0"] = c.r0;
    doc["p"] = c.p;
    doc["E2"] = {c.location.S, c.location.I};
    doc["jacobian"] = {{c.jacobian.a, c.jacobian.b}, {c.jacobian.c, c.jacobian.d}};
    doc["expected"] = {{c.expected.a, c.expected.b}, {c.expected.c, c.expected.d}};
    doc["jacobian_error"] = c.jacobian_error;
    doc["eigenvalues"] = eig_json(c.eigenvalues);
    doc["max_eig_modulus"] = c.max_eig_modulus;
    doc["curves_at_2"] = {{"p_sn", c.p}, {"p_t", c.p_t}, {"p_h", c.p_h}, {"p_bt2", c.p_bt2}};
    doc["ok"] = c.ok;

    std::ostringstream csv;
    csv << csv_preamble(config) << "quantity,value\n";
    csv << "r0," << fmt(c.r0) << "\np," << fmt(c.p) << "\nS," << fmt(c.location.S) << "\nI," << fmt(c.location.I)
        << "\nj11," << fmt(c.jacobian.a) << "\nj12," << fmt(c.jacobian.b) << "\nj21," << fmt(c.jacobian.c) << "\nj22,"
        << fmt(c.jacobian.d) << "\njacobian_error," << fmt(c.jacobian_error) << "\nmax_eig_modulus,"
        << fmt(c.max_eig_modulus) << "\np_t," << fmt(c.p_t) << "\np_h," << fmt(c.p_h) << "\np_bt2," << fmt(c.p_bt2)
        << "\nok," << (c.ok ? 1 : 0) << '\n';
    out.emit("dz.json", "json", doc.dump(2) + "\n", true);
    out.emit("dz.csv", "csv", csv.str(), true);
    std::ostringstream s;
    s << "DZ at (2, " << fmt(c.p) << "): Jacobian error " << fmt(c.jacobian_error) << ", max |lambda| "
      << fmt(c.max_eig_modulus) << (c.ok ? " [ok]\n" : " [FAILED]\n");
    out.summary(s.str());
    return c.ok ? 0 : 3;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Bifurcation atlas of the vaccinated logistic SIR model"};
    app.footer(schema_help);
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "TOML/INI file supplying any flag (sections per subcommand)");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.set_version_flag("--version", version);

    Global G;
    app.add_option("--params", G.params_file, "parameter file: 'key = value' lines or a JSON object (A,beta,m,mu,d,g,p)");
    app.add_option("--out", G.out, "output directory (default: primary artifact to stdout)");
    app.add_option("--format", G.formats, "csv, json or svg; repeatable")->check(CLI::IsMember({"csv", "json", "svg"}));
    app.add_option("--tol", G.tol, "integrator tolerance")->check(CLI::Range(1e-13, 1e-3));
    app.add_option("--jobs", G.jobs, "worker threads (0: hardware concurrency)");
    app.add_option("--carrier", G.carrier, "rate that absorbs R0 changes: transmission (beta) or removal (sigma+g)")
        ->check(CLI::IsMember({"transmission", "removal"}));
    app.add_option("--A", G.A, "carrying capacity");
    app.add_option("--beta", G.beta, "transmission rate");
    app.add_option("--m", G.m, "birth rate");
    app.add_option("--mu", G.mu, "natural death rate");
    app.add_option("--d", G.d, "disease death rate");
    app.add_option("--g", G.g, "recovery rate");
    app.add_option("--p", G.p, "vaccinated proportion");
    app.add_option("--r0", G.r0, "set R0 through the carrier, keeping the other rates");

    auto* eq = app.add_subcommand("equilibria", "equilibria, eigenvalues and stability classes");

    AtlasOpts ao;
    auto* atlas = app.add_subcommand("atlas", "bifurcation curves, region grid and diagram");
    atlas->add_option("--r0-min", ao.r0_min, "grid lower R0")->capture_default_str();
    atlas->add_option("--r0-max", ao.r0_max, "grid upper R0")->capture_default_str();
    atlas->add_option("--p-min", ao.p_min, "grid lower p")->capture_default_str();
    atlas->add_option("--p-max", ao.p_max, "grid upper p")->capture_default_str();
    atlas->add_option("--nr", ao.nr, "grid points in R0")->capture_default_str();
    atlas->add_option("--np", ao.np, "grid points in p")->capture_default_str();
    atlas->add_option("--samples", ao.samples, "curve sampling density")->capture_default_str();
    atlas->add_option("--het", ao.het, "heteroclinic curve: fit (published table) or shoot")
        ->check(CLI::IsMember({"fit", "shoot"}))
        ->capture_default_str();

    PortraitOpts po;
    auto* portraits = app.add_subcommand("portraits", "phase portraits for region representatives");
    portraits->add_option("--regions", po.regions, "region labels A..H")->delimiter(',');
    portraits->add_option("--fan", po.fan, "initial conditions per region")->capture_default_str();
    portraits->add_option("--horizon", po.horizon, "integration horizon")->capture_default_str();
    portraits->add_option("--het", po.het, "heteroclinic curve: shoot or fit")
        ->check(CLI::IsMember({"fit", "shoot"}))
        ->capture_default_str();

    SimulateOpts so;
    auto* sim = app.add_subcommand("simulate", "integrate one trajectory");
    sim->add_option("--x0", so.x0, "initial S and I (\"S,I\" or two values)")->expected(2)->delimiter(',');
    sim->add_option("--t-end", so.t_end, "final time")->capture_default_str();
    sim->add_flag("--reversed", so.reversed, "integrate the negated field");
    sim->add_flag("--with-R", so.with_R, "also integrate the recovered compartment");
    sim->add_option("--R-init", so.R_init, "initial recovered value")->capture_default_str();
    sim->add_flag("--stop-at-equilibrium", so.stop_at_equilibrium, "stop on convergence to an equilibrium");

    HetOpts ho;
    auto* het_table = app.add_subcommand("het-table", "heteroclinic p by shooting and bisection");
    het_table->add_option("--r0-list", ho.r0_list, "R0 values (default: the published abscissae)")->delimiter(',');
    het_table->add_option("--tol-p", ho.tol_p, "bisection width")->capture_default_str();
    het_table->add_option("--offset", ho.offset, "manifold seed offset")->check(CLI::Range(1e-8, 1e-4));

    HetOpts hf;
    auto* het_fit = app.add_subcommand("het-fit", "power law a R0^b + c through heteroclinic points");
    het_fit->add_option("--table", hf.table, "CSV with r0,p_het columns (default: embedded published table)");
    het_fit->add_flag("--shoot", hf.shoot, "compute the table by shooting first");
    het_fit->add_option("--r0-list", hf.r0_list, "R0 values for --shoot")->delimiter(',');
    het_fit->add_option("--tol-p", hf.tol_p, "bisection width for --shoot")->capture_default_str();
    het_fit->add_option("--offset", hf.offset, "manifold seed offset for --shoot")->check(CLI::Range(1e-8, 1e-4));

    bool skip_het = false;
    double cycle_tol_p = 1e-6;
    auto* cycle = app.add_subcommand("cycle", "unstable periodic orbit of region E");
    cycle->add_flag("--skip-het-check", skip_het, "do not verify p > p_het by shooting");
    cycle->add_option("--tol-p", cycle_tol_p, "bisection width of the p_het check")->capture_default_str();

    auto* dz = app.add_subcommand("dz", "double-zero point certificate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    if (G.jobs == 0) G.jobs = std::max(1u, std::thread::hardware_concurrency());

    try {
        if (eq->parsed()) return cmd_equilibria(G);
        if (atlas->parsed()) return cmd_atlas(G, ao);
        if (portraits->parsed()) return cmd_portraits(G, po);
        if (sim->parsed()) return cmd_simulate(G, so);
        if (het_table->parsed()) return cmd_het_table(G, ho);
        if (het_fit->parsed()) return cmd_het_fit(G, hf);
        if (cycle->parsed()) return cmd_cycle(G, skip_het, cycle_tol_p);
        if (dz->parsed()) return cmd_dz(G);
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
