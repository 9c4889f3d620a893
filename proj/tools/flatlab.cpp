// flatlab command-line tool: surface construction, validation, tracing,
// cylinder queries, deformations, linear-model checks, and experiment runs.
// Exit codes: 0 success, 1 validation/report failure, 2 usage error or
// malformed JSON input.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "flatlab/deform.hpp"
#include "flatlab/experiments.hpp"
#include "flatlab/families.hpp"
#include "flatlab/io.hpp"
#include "flatlab/linmodel.hpp"
#include "flatlab/stats.hpp"
#include "flatlab/surface_json.hpp"
#include "flatlab/trace.hpp"
#include "flatlab/version.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace flatlab;

namespace {

struct Globals {
    std::uint64_t seed = 0;
    bool seed_given = false;
    int threads = 1;
    NumericPolicy policy;
    std::string out;
};

void echo_config(const std::string& cmd, json extra, const Globals& g) {
    extra["command"] = cmd;
    extra["seed"] = g.seed;
    extra["threads"] = g.threads;
    extra["eps"] = {g.policy.eps_glue, g.policy.eps_hit, g.policy.eps_dedup};
    std::cerr << extra.dump() << "\n";
}

void emit(const std::string& out, const std::string& text) {
    if (out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out);
    if (!f) throw Error("Io", "cannot open output file: " + out);
    f << text;
}

void emit_json(const std::string& out, const json& j) { emit(out, j.dump(2) + "\n"); }

std::vector<std::string> num_row(const std::vector<double>& vals) {
    std::vector<std::string> cells;
    for (double v : vals) cells.push_back(io::num(v));
    return cells;
}

// CSV to --out or stdout with fixed column order.
class CsvSink {
  public:
    CsvSink(const std::string& out, const std::vector<std::string>& header) {
        if (!out.empty()) {
            file_.emplace(out, header);
            return;
        }
        for (std::size_t i = 0; i < header.size(); ++i)
            std::cout << (i ? "," : "") << header[i];
        std::cout << "\n";
        width_ = header.size();
    }
    void row(const std::vector<std::string>& cells) {
        if (file_) {
            file_->row(cells);
            return;
        }
        if (cells.size() != width_) throw InvalidParameter("csv row width mismatch");
        for (std::size_t i = 0; i < cells.size(); ++i)
            std::cout << (i ? "," : "") << cells[i];
        std::cout << "\n";
    }

  private:
    std::optional<io::CsvWriter> file_;
    std::size_t width_ = 0;
};

json validation_to_json(const ValidationReport& rep) {
    json j;
    j["valid"] = rep.valid;
    j["genus"] = rep.genus;
    j["stratum"] = rep.stratum_label;
    j["cone_angles"] = rep.cone_angles;
    for (const auto& c : rep.checks)
        j["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    return j;
}

json cylinders_to_json(const HorizontalDecomposition& dec) {
    json j;
    j["periodic"] = dec.periodic;
    j["diagnostic"] = dec.diagnostic;
    j["cylinders"] = json::array();
    for (const auto& c : dec.cylinders)
        j["cylinders"].push_back({{"circumference", c.circumference},
                                  {"height", c.height},
                                  {"twist", c.twist},
                                  {"area", c.area()}});
    return j;
}

Mat2 parse_mat(const std::vector<double>& m) {
    if (m.size() != 4) throw InvalidParameter("--matrix needs 4 comma-separated entries");
    return Mat2{m[0], m[1], m[2], m[3]};
}

// ---------------------------------------------------------------------------
// subcommand bodies
// ---------------------------------------------------------------------------

int cmd_validate(const Globals& g, const std::string& surface_path) {
    echo_config("validate", {{"surface", surface_path}}, g);
    SurfaceData d = load_surface_data(surface_path, g.policy);
    ValidationReport rep = TranslationSurface::validate(d);
    emit_json(g.out, validation_to_json(rep));
    return rep.valid ? 0 : 1;
}

int cmd_build(const Globals& g, const std::string& family, const std::vector<double>& v1,
              const std::vector<double>& v2, double a, double b, double tau1, double tau2,
              double x, double tau, const std::vector<double>& lat, bool sample) {
    echo_config("build", {{"family", family}}, g);
    TranslationSurface s;
    if (family == "square-torus") {
        s = make_square_torus(g.policy);
    } else if (family == "torus") {
        if (v1.size() != 2 || v2.size() != 2)
            throw InvalidParameter("torus needs --v1 x,y and --v2 x,y");
        s = make_flat_torus(Lattice{{v1[0], v1[1]}, {v2[0], v2[1]}}, g.policy);
    } else if (family == "octagon") {
        s = make_regular_octagon(g.policy);
    } else if (family == "h11") {
        H11Point p;
        p.a = a;
        p.b = b;
        p.tau1 = tau1;
        p.tau2 = tau2;
        s = build_h11(p, g.policy);
    } else if (family == "h2") {
        H2Point p;
        if (sample) {
            Rng rng = Rng::stream(g.seed, 0);
            p = sample_h2(rng, a);
        } else if (!lat.empty()) {
            if (lat.size() != 4)
                throw InvalidParameter("--lattice needs 4 comma-separated entries");
            p.a = a;
            p.x = x;
            p.tau = tau;
            p.lattice = Lattice{{lat[0], lat[1]}, {lat[2], lat[3]}};
        } else {
            p = make_aw_instance();
        }
        s = build_h2(p, g.policy);
    } else {
        throw InvalidParameter("unknown family: " + family);
    }
    emit_json(g.out, surface_to_json(s));
    return 0;
}

int cmd_sample(const Globals& g, const std::string& family, int n, double a) {
    echo_config("sample", {{"family", family}, {"n", n}, {"a", a}}, g);
    if (n < 1) throw InvalidParameter("--n must be >= 1");
    if (family == "h11") {
        CsvSink csv(g.out, {"index", "a", "b", "tau1", "tau2"});
        for (int i = 0; i < n; ++i) {
            Rng rng = Rng::stream(g.seed, static_cast<std::uint64_t>(i));
            H11Point p = sample_h11(rng);
            csv.row(num_row({static_cast<double>(i), p.a, p.b, p.tau1, p.tau2}));
        }
    } else if (family == "h2") {
        CsvSink csv(g.out, {"index", "a", "x", "tau", "b1x", "b1y", "b2x", "b2y"});
        for (int i = 0; i < n; ++i) {
            Rng rng = Rng::stream(g.seed, static_cast<std::uint64_t>(i));
            H2Point p = sample_h2(rng, a);
            csv.row(num_row({static_cast<double>(i), p.a, p.x, p.tau, p.lattice.b1.x,
                             p.lattice.b1.y, p.lattice.b2.x, p.lattice.b2.y}));
        }
    } else if (family == "torus-haar") {
        CsvSink csv(g.out, {"index", "v1x", "v1y", "v2x", "v2y"});
        for (int i = 0; i < n; ++i) {
            Rng rng = Rng::stream(g.seed, static_cast<std::uint64_t>(i));
            Lattice lat = sample_torus_haar(rng);
            csv.row(num_row({static_cast<double>(i), lat.b1.x, lat.b1.y, lat.b2.x,
                             lat.b2.y}));
        }
    } else {
        throw InvalidParameter("unknown sampling family: " + family);
    }
    return 0;
}

int cmd_sc(const Globals& g, const std::string& surface_path, double max_len,
           const std::vector<double>& mat) {
    echo_config("sc", {{"surface", surface_path}, {"max_len", max_len}}, g);
    TranslationSurface s = load_surface(surface_path, g.policy);
    std::vector<SaddleConnection> scs;
    if (!mat.empty())
        scs = saddle_connections_region(s, {parse_mat(mat), max_len});
    else
        scs = saddle_connections(s, max_len);
    std::sort(scs.begin(), scs.end(), [](const SaddleConnection& p, const SaddleConnection& q) {
        return std::tie(p.length, p.start_class, p.prong, p.hol.x, p.hol.y) <
               std::tie(q.length, q.start_class, q.prong, q.hol.x, q.hol.y);
    });
    CsvSink csv(g.out, {"start_class", "prong", "hol_x", "hol_y", "length"});
    for (const auto& sc : scs)
        csv.row(num_row({static_cast<double>(sc.start_class), static_cast<double>(sc.prong),
                         sc.hol.x, sc.hol.y, sc.length}));
    return 0;
}

int cmd_cylinders(const Globals& g, const std::string& surface_path, double theta,
                  double cap) {
    echo_config("cylinders", {{"surface", surface_path}, {"theta", theta}, {"cap", cap}}, g);
    TranslationSurface s = load_surface(surface_path, g.policy);
    json j;
    if (theta == 0.0) {
        j = cylinders_to_json(horizontal_cylinders(s, cap));
    } else {
        DirectionalCylinders dc = cylinders_in_direction(s, theta, cap);
        j = cylinders_to_json(dc.dec);
    }
    j["theta"] = theta;
    emit_json(g.out, j);
    return 0;
}

int cmd_flow(const Globals& g, const std::string& surface_path, const CLI::Option* geo,
             double t, const CLI::Option* horo, double sarg, const std::vector<double>& mat) {
    echo_config("flow", {{"surface", surface_path}}, g);
    TranslationSurface s = load_surface(surface_path, g.policy);
    if (geo->count())
        s = flow_geodesic(s, t);
    else if (horo->count())
        s = flow_horocycle(s, sarg);
    else if (!mat.empty())
        s = flow(s, parse_mat(mat));
    else
        throw InvalidParameter("flow needs one of --geodesic, --horocycle, --matrix");
    emit_json(g.out, surface_to_json(s));
    return 0;
}

int cmd_surgery(const Globals& g, const std::string& surface_path, const CLI::Option* twist,
                int twist_idx, int count, const std::vector<double>& move,
                const CLI::Option* extend, double theta, double cap) {
    echo_config("surgery", {{"surface", surface_path}}, g);
    TranslationSurface s = load_surface(surface_path, g.policy);
    if (twist->count()) {
        s = dehn_twist(s, twist_idx, count, cap);
    } else if (!move.empty()) {
        if (move.size() != 3)
            throw InvalidParameter("--move needs cylinder,shear,stretch");
        s = cylinder_surgery(
            s, {{static_cast<int>(move[0]), move[1], move[2]}}, cap);
    } else if (extend->count()) {
        ExtendResult er = extend_horizontal_scs(s, theta, cap);
        std::cerr << json({{"growth", er.growth}, {"cylinder_area", er.cylinder_area}}).dump()
                  << "\n";
        s = er.surface;
    } else {
        throw InvalidParameter("surgery needs one of --twist, --move, --extend");
    }
    emit_json(g.out, surface_to_json(s));
    return 0;
}

// Randomized check harness shared by `linmodel --check ...` and the test suite:
// standard pairing perturbed by U(-0.3, 0.3) entries, instances drawn from
// per-index streams.
int cmd_linmodel(const Globals& g, const std::string& check, int d, int n, long mc) {
    echo_config("linmodel", {{"check", check}, {"d", d}, {"n", n}, {"mc", mc}}, g);
    if (d < 1 || n < 1) throw InvalidParameter("need --d >= 1 and --n >= 1");
    json j;
    j["check"] = check;
    j["d"] = d;
    j["n"] = n;
    j["seed"] = g.seed;
    bool pass = false;
    if (check == "jacobian" || check == "contraction") {
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            Rng rng = Rng::stream(g.seed, static_cast<std::uint64_t>(i));
            linmodel::SplitSpace sp = linmodel::random_space(d, rng);
            if (check == "jacobian") {
                linmodel::JacobianInstance inst = linmodel::random_jacobian_instance(sp, rng);
                linmodel::JacobianResult res =
                    linmodel::jacobian_check(sp, inst.y0, inst.y1, inst.x, inst.frame);
                worst = std::max(worst, std::abs(res.measured / res.predicted - 1.0));
            } else {
                linmodel::ContractionInstance inst =
                    linmodel::random_contraction_instance(sp, rng);
                linmodel::ContractionResult res =
                    linmodel::contraction_check(sp, inst.q, inst.frame);
                worst = std::max(worst, std::abs(res.lhs - res.rhs) /
                                            std::max(1.0, std::abs(res.lhs)));
            }
        }
        j["max_rel_err"] = worst;
        pass = worst <= 1e-8;
    } else if (check == "cone") {
        linmodel::ConeResult res;
        for (std::uint64_t attempt = 0;; ++attempt) {
            if (attempt == 16) throw SearchExhausted("no chart-valid cone patch drawn");
            Rng rng = Rng::stream(g.seed, attempt);
            linmodel::SplitSpace sp = linmodel::random_space(d, rng);
            linmodel::ConePatch patch = linmodel::random_cone_patch(sp, rng);
            try {
                res = linmodel::cone_measure_check(sp, patch, mc, rng);
                break;
            } catch (const OutsideChart&) {
                continue;  // pairing noise pushed the patch off the chart; redraw
            }
        }
        j["ratio"] = res.ratio;
        j["sigma"] = res.sigma;
        j["expected"] = 2.0 * d;
        j["hits"] = res.hits;
        pass = std::abs(res.ratio - 2.0 * d) <= 3.0 * res.sigma && res.hits > 100;
    } else {
        throw InvalidParameter("unknown check: " + check);
    }
    j["pass"] = pass;
    emit_json(g.out, j);
    return pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// experiment run/template
// ---------------------------------------------------------------------------

experiments::EquiConfig equi_from_json(const json& c, const Globals& g) {
    experiments::EquiConfig cfg;
    cfg.a0 = c.value("a0", cfg.a0);
    cfg.a1 = c.value("a1", cfg.a1);
    cfg.n = c.value("n", cfg.n);
    cfg.t_grid = c.value("t_grid", cfg.t_grid);
    cfg.seed = c.value("seed", g.seed);
    cfg.threads = c.value("threads", g.threads);
    cfg.count_radii = c.value("count_radii", cfg.count_radii);
    cfg.horizontal_cap = c.value("horizontal_cap", cfg.horizontal_cap);
    return cfg;
}

void write_equi_outputs(const experiments::EquiReport& rep, const fs::path& dir) {
    io::write_json((dir / "report.json").string(), rep.to_json());
    std::vector<std::string> header = {"source", "sample", "t", "shortest_sc"};
    for (std::size_t ri = 0; ri < rep.cfg.count_radii.size(); ++ri)
        header.push_back("count_r" + std::to_string(ri));
    if (rep.cfg.horizontal_cap > 0) {
        header.push_back("horizontal_cyl_count");
        header.push_back("shortest_horizontal");
    }
    io::CsvWriter csv((dir / "samples.csv").string(), header);
    for (const auto& s : rep.samples) {
        if (!s.ok) continue;
        for (std::size_t ti = 0; ti < rep.cfg.t_grid.size(); ++ti) {
            const experiments::ObservableVector& o = s.per_t[ti];
            std::vector<std::string> cells = {std::to_string(s.source),
                                              std::to_string(s.index),
                                              io::num(rep.cfg.t_grid[ti]),
                                              io::num(o.shortest_sc)};
            for (long c : o.sc_count_at) cells.push_back(std::to_string(c));
            if (rep.cfg.horizontal_cap > 0) {
                cells.push_back(o.horizontal_cyl_count
                                    ? std::to_string(*o.horizontal_cyl_count)
                                    : "");
                cells.push_back(o.shortest_horizontal ? io::num(*o.shortest_horizontal)
                                                      : "");
            }
            csv.row(cells);
        }
    }
    for (int src = 0; src < 2; ++src)
        for (std::size_t ti = 0; ti < rep.cfg.t_grid.size(); ++ti) {
            std::vector<double> v;
            for (const auto& s : rep.samples)
                if (s.ok && s.source == src) v.push_back(s.per_t[ti].shortest_sc);
            if (v.empty()) continue;
            stats::Histogram h = stats::make_histogram(v, 40);
            std::string name = "hist_shortest_src" + std::to_string(src) + "_t" +
                               std::to_string(ti) + ".svg";
            io::write_svg_histogram((dir / name).string(), h,
                                    "shortest saddle connection, source " +
                                        std::to_string(src) + ", t = " +
                                        io::num(rep.cfg.t_grid[ti]));
        }
}

int cmd_experiment_run(const Globals& g, const std::string& config_path,
                       const std::string& out_dir) {
    std::ifstream f(config_path);
    if (!f) throw Error("Io", "cannot open config: " + config_path);
    json c = json::parse(f);  // parse_error escapes to the exit-2 handler
    std::string kind = c.value("kind", "");
    echo_config("experiment", {{"config", config_path}, {"kind", kind}}, g);
    fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
    fs::create_directories(dir);

    if (kind == "equidistribution") {
        experiments::EquiReport rep = experiments::run_equidistribution(equi_from_json(c, g));
        write_equi_outputs(rep, dir);
    } else if (kind == "nondivergence") {
        experiments::NondivConfig cfg;
        cfg.n_base = c.value("n_base", cfg.n_base);
        cfg.T = c.value("T", cfg.T);
        cfg.eta = c.value("eta", cfg.eta);
        cfg.ds_factor = c.value("ds_factor", cfg.ds_factor);
        cfg.seed = c.value("seed", g.seed);
        cfg.threads = c.value("threads", g.threads);
        cfg.certify_cap = c.value("certify_cap", cfg.certify_cap);
        experiments::NondivReport rep = experiments::run_nondivergence(cfg);
        io::write_json((dir / "report.json").string(), rep.to_json());
        io::CsvWriter csv((dir / "bases.csv").string(),
                          {"index", "a", "b", "tau1", "tau2", "theta", "fraction",
                           "grid_total", "grid_bad", "tube_scs", "intervals"});
        for (std::size_t i = 0; i < rep.bases.size(); ++i) {
            const auto& b = rep.bases[i];
            csv.row({std::to_string(i), io::num(b.point.a), io::num(b.point.b),
                     io::num(b.point.tau1), io::num(b.point.tau2), io::num(b.theta),
                     io::num(b.fraction), std::to_string(b.grid_total),
                     std::to_string(b.grid_bad), std::to_string(b.tube_scs),
                     std::to_string(b.intervals)});
        }
    } else if (kind == "leaf_equivalence") {
        experiments::LeafWalkConfig cfg;
        cfg.n_walks = c.value("n_walks", cfg.n_walks);
        cfg.n_steps = c.value("n_steps", cfg.n_steps);
        cfg.max_step = c.value("max_step", cfg.max_step);
        cfg.seed = c.value("seed", g.seed);
        cfg.threads = c.value("threads", g.threads);
        cfg.cap = c.value("cap", cfg.cap);
        experiments::LeafReport rep = experiments::run_leaf_equivalence(cfg);
        io::write_json((dir / "report.json").string(), rep.to_json());
        io::CsvWriter csv((dir / "walks.csv").string(),
                          {"index", "a", "b", "tau1", "tau2", "steps_done", "truncated",
                           "violations"});
        for (std::size_t i = 0; i < rep.walks.size(); ++i) {
            const auto& w = rep.walks[i];
            csv.row({std::to_string(i), io::num(w.start.a), io::num(w.start.b),
                     io::num(w.start.tau1), io::num(w.start.tau2),
                     std::to_string(w.steps_done), w.truncated ? "1" : "0",
                     std::to_string(w.violations)});
        }
        if (rep.total_violations != 0) return 1;
    } else if (kind == "aw_extension") {
        experiments::AwConfig cfg;
        cfg.target = c.value("target", cfg.target);
        cfg.target_factor = c.value("target_factor", cfg.target_factor);
        cfg.max_steps = c.value("max_steps", cfg.max_steps);
        cfg.thetas = c.value("thetas", cfg.thetas);
        cfg.cap = c.value("cap", cfg.cap);
        TranslationSurface s = c.contains("surface")
                                   ? load_surface(c["surface"].get<std::string>(), g.policy)
                                   : build_h2(make_aw_instance(), g.policy);
        experiments::AwReport rep = experiments::run_aw_extension(s, cfg);
        io::write_json((dir / "report.json").string(), rep.to_json());
        io::CsvWriter csv((dir / "steps.csv").string(),
                          {"index", "theta", "area_frac", "growth", "shortest_before",
                           "shortest_after", "rel_err", "circ_max_delta"});
        for (std::size_t i = 0; i < rep.steps.size(); ++i) {
            const auto& st = rep.steps[i];
            csv.row({std::to_string(i), io::num(st.theta), io::num(st.area_frac),
                     io::num(st.growth), io::num(st.shortest_before),
                     io::num(st.shortest_after), io::num(st.rel_err),
                     io::num(st.circ_max_delta)});
        }
        if (!rep.reached) return 1;
    } else {
        throw InvalidParameter(
            "unknown experiment kind (want equidistribution, nondivergence, "
            "leaf_equivalence, aw_extension): " +
            kind);
    }
    std::cerr << "wrote " << (dir / "report.json").string() << "\n";
    return 0;
}

int cmd_experiment_template(const std::string& kind, const std::string& out) {
    json j;
    if (kind == "equidistribution")
        j = experiments::EquiConfig{}.to_json();
    else if (kind == "nondivergence")
        j = experiments::NondivConfig{}.to_json();
    else if (kind == "leaf_equivalence")
        j = experiments::LeafWalkConfig{}.to_json();
    else if (kind == "aw_extension")
        j = experiments::AwConfig{}.to_json();
    else
        throw InvalidParameter("unknown experiment kind: " + kind);
    j["kind"] = kind;
    emit_json(out, j);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(kVersion) +
                 " — computational experiments on translation surfaces"};
    app.require_subcommand(1);
    Globals g;
    g.threads = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FLATLAB_SEED")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0') g.seed = v;
    }
    auto* seed_opt = app.add_option("--seed", g.seed, "RNG seed (overrides FLATLAB_SEED)");
    app.add_option("--threads", g.threads, "worker thread count");
    app.add_option("--eps-glue", g.policy.eps_glue, "gluing tolerance");
    app.add_option("--eps-hit", g.policy.eps_hit, "near-vertex hit tolerance");
    app.add_option("--eps-dedup", g.policy.eps_dedup, "dedup tolerance");
    app.add_option("--out", g.out, "output file (default: stdout)");
    app.set_version_flag("--version", std::string(kVersion));
    (void)seed_opt;

    // validate
    auto* validate = app.add_subcommand("validate", "validate a surface JSON file");
    validate->fallthrough();
    std::string v_surface;
    validate->add_option("--surface", v_surface, "surface JSON path")->required();

    // build
    auto* build = app.add_subcommand("build", "construct a family surface");
    build->fallthrough();
    std::string b_family;
    std::vector<double> b_v1, b_v2, b_lat;
    double b_a = 0.5, b_b = 0.2, b_tau1 = 0, b_tau2 = 0, b_x = 0.5, b_tau = 0.25;
    bool b_sample = false;
    build->add_option("--family", b_family,
                      "square-torus | torus | octagon | h11 | h2")
        ->required();
    build->add_option("--v1", b_v1, "torus basis vector x,y")->delimiter(',');
    build->add_option("--v2", b_v2, "torus basis vector x,y")->delimiter(',');
    build->add_option("--a", b_a, "family parameter a");
    build->add_option("--b", b_b, "h11 parameter b");
    build->add_option("--tau1", b_tau1, "h11 twist 1");
    build->add_option("--tau2", b_tau2, "h11 twist 2");
    build->add_option("--x", b_x, "h2 slit length");
    build->add_option("--tau", b_tau, "h2 twist");
    build->add_option("--lattice", b_lat, "h2 lattice b1x,b1y,b2x,b2y")->delimiter(',');
    build->add_flag("--sample", b_sample, "draw the h2 point from the sampler");

    // sample
    auto* sample = app.add_subcommand("sample", "sample family parameters to CSV");
    sample->fallthrough();
    std::string s_family;
    int s_n = 10;
    double s_a = 0.3;
    sample->add_option("--family", s_family, "h11 | h2 | torus-haar")->required();
    sample->add_option("--n", s_n, "sample count");
    sample->add_option("--a", s_a, "h2 slit-cylinder height");

    // sc
    auto* sc = app.add_subcommand("sc", "enumerate saddle connections to CSV");
    sc->fallthrough();
    std::string sc_surface;
    double sc_maxlen = 1.0;
    std::vector<double> sc_mat;
    sc->add_option("--surface", sc_surface, "surface JSON path")->required();
    sc->add_option("--max-len", sc_maxlen, "length cutoff")->required();
    sc->add_option("--matrix", sc_mat, "search metric matrix a,b,c,d")->delimiter(',');

    // cylinders
    auto* cyl = app.add_subcommand("cylinders", "cylinder decomposition report");
    cyl->fallthrough();
    std::string cy_surface;
    double cy_theta = 0.0, cy_cap = 1e4;
    cyl->add_option("--surface", cy_surface, "surface JSON path")->required();
    cyl->add_option("--theta", cy_theta, "direction (radians, default horizontal)");
    cyl->add_option("--cap", cy_cap, "separatrix length cap");

    // flow
    auto* flow_cmd = app.add_subcommand("flow", "apply a GL2+ deformation");
    flow_cmd->fallthrough();
    std::string f_surface;
    double f_t = 0, f_s = 0;
    std::vector<double> f_mat;
    flow_cmd->add_option("--surface", f_surface, "surface JSON path")->required();
    auto* f_geo = flow_cmd->add_option("--geodesic", f_t, "geodesic time t");
    auto* f_horo = flow_cmd->add_option("--horocycle", f_s, "horocycle time s");
    flow_cmd->add_option("--matrix", f_mat, "matrix a,b,c,d")->delimiter(',');

    // surgery
    auto* surgery = app.add_subcommand("surgery", "cylinder surgeries");
    surgery->fallthrough();
    std::string su_surface;
    int su_twist = 0, su_count = 1;
    std::vector<double> su_move;
    double su_theta = std::numbers::pi / 2, su_cap = 1e4;
    surgery->add_option("--surface", su_surface, "surface JSON path")->required();
    auto* su_twist_opt =
        surgery->add_option("--twist", su_twist, "full Dehn twist in cylinder INDEX");
    surgery->add_option("--count", su_count, "twist count");
    surgery->add_option("--move", su_move, "cylinder,shear,stretch")->delimiter(',');
    auto* su_extend =
        surgery->add_flag("--extend", "one horizontal-extension step (shrink + stretch)");
    surgery->add_option("--theta", su_theta, "extension cylinder direction");
    surgery->add_option("--cap", su_cap, "search cap");

    // linmodel
    auto* lin = app.add_subcommand("linmodel", "linear-model checks");
    lin->fallthrough();
    std::string l_check;
    int l_d = 2, l_n = 100;
    long l_mc = 200000;
    lin->add_option("--check", l_check, "jacobian | contraction | cone")->required();
    lin->add_option("--d", l_d, "half-dimension d");
    lin->add_option("--n", l_n, "instance count");
    lin->add_option("--mc", l_mc, "Monte Carlo sample count (cone)");

    // experiment
    auto* exp = app.add_subcommand("experiment", "config-driven experiment runs");
    exp->require_subcommand(1);
    auto* exp_run = exp->add_subcommand("run", "run a config file");
    exp_run->fallthrough();
    std::string e_config, e_out;
    exp_run->add_option("config", e_config, "experiment config JSON")->required();
    exp_run->add_option("--out-dir", e_out, "output directory (default: .)");
    auto* exp_tpl = exp->add_subcommand("template", "print a default config");
    exp_tpl->fallthrough();
    std::string t_kind;
    exp_tpl->add_option("kind", t_kind, "experiment kind")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 0;
    }

    try {
        g.policy.check();
        if (validate->parsed()) return cmd_validate(g, v_surface);
        if (build->parsed())
            return cmd_build(g, b_family, b_v1, b_v2, b_a, b_b, b_tau1, b_tau2, b_x, b_tau,
                             b_lat, b_sample);
        if (sample->parsed()) return cmd_sample(g, s_family, s_n, s_a);
        if (sc->parsed()) return cmd_sc(g, sc_surface, sc_maxlen, sc_mat);
        if (cyl->parsed()) return cmd_cylinders(g, cy_surface, cy_theta, cy_cap);
        if (flow_cmd->parsed())
            return cmd_flow(g, f_surface, f_geo, f_t, f_horo, f_s, f_mat);
        if (surgery->parsed())
            return cmd_surgery(g, su_surface, su_twist_opt, su_twist, su_count, su_move,
                               su_extend, su_theta, su_cap);
        if (lin->parsed()) return cmd_linmodel(g, l_check, l_d, l_n, l_mc);
        if (exp->parsed()) {
            if (exp_run->parsed()) return cmd_experiment_run(g, e_config, e_out);
            if (exp_tpl->parsed()) return cmd_experiment_template(t_kind, g.out);
        }
    } catch (const json::parse_error& e) {
        std::cerr << "error: malformed JSON: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "error: bad JSON shape: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
