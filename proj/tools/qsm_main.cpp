// qsm: command line front end over the public C API.
//
// Subcommands emit CSV tables on stdout (or --out FILE). Output is
// deterministic byte for byte for a fixed command line: floats print with
// 12 significant digits, '.' decimal separator, LF line endings. Every
// table starts with '#' comment lines that record the fully resolved
// configuration, then a column header, then data rows.
//
// A --config FILE holds "key = value" lines grouped in [command] sections;
// values there fill in any option the command line left unset, so explicit
// flags always win. Exit status is 0 on success and nonzero with a single
// stderr line otherwise.

#include <qsm/qsm.h>

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct CliError {
    std::string message;
    int code;
};

[[noreturn]] void fail(const std::string& message, int code = 1) { throw CliError{message, code}; }

void check(qsm_status status) {
    if (status != QSM_OK) fail(std::string(qsm_status_name(status)) + ": " + qsm_last_error_message());
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// ---- config file ------------------------------------------------------

// minimal INI: [section] headers, key = value lines, '#'/';' comments.
// returns section -> ordered key/value list; top-level keys live under "".
using ConfigMap = std::map<std::string, std::vector<std::pair<std::string, std::string>>>;

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

ConfigMap load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open config file '" + path + "'", 2);
    ConfigMap sections;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') fail(path + ":" + std::to_string(lineno) + ": unterminated section header", 2);
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) fail(path + ":" + std::to_string(lineno) + ": expected key = value", 2);
        sections[section].emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return sections;
}

// config values land in the same storage the flags use, but only when the
// flag was absent; parsing mirrors the flag types.
struct ConfigTarget {
    CLI::Option* opt = nullptr;
    std::function<void(const std::string&)> apply;
};

class ConfigBinder {
  public:
    void bind(CLI::Option* opt, double* var) {
        add(opt, [var, opt](const std::string& v) { *var = parse_double(v, opt->get_name()); });
    }
    void bind(CLI::Option* opt, int* var) {
        add(opt, [var, opt](const std::string& v) { *var = parse_int(v, opt->get_name()); });
    }
    void bind(CLI::Option* opt, long long* var) {
        add(opt, [var, opt](const std::string& v) { *var = (long long)parse_int(v, opt->get_name()); });
    }
    void bind(CLI::Option* opt, std::string* var) {
        add(opt, [var](const std::string& v) { *var = v; });
    }
    void bind(CLI::Option* opt, std::vector<double>* var) {
        add(opt, [var, opt](const std::string& v) {
            var->clear();
            for (const std::string& tok : split(v)) var->push_back(parse_double(tok, opt->get_name()));
        });
    }

    // fills unset options of `command` from the top-level and [command]
    // sections; unknown keys are an error, sections of other commands are
    // shared-file content and stay untouched.
    void apply(const ConfigMap& cfg, const std::string& command) {
        for (const std::string& section : {std::string(), command}) {
            const auto it = cfg.find(section);
            if (it == cfg.end()) continue;
            for (const auto& [key, value] : it->second) {
                const auto target = targets_.find(key);
                if (target == targets_.end())
                    fail("config key '" + key + "' is not an option of '" + command + "'", 2);
                if (target->second.opt->count() == 0) target->second.apply(value);
            }
        }
    }

  private:
    void add(CLI::Option* opt, std::function<void(const std::string&)> fn) {
        std::string name = opt->get_name();  // "--beta"
        targets_[name.substr(2)] = ConfigTarget{opt, std::move(fn)};
    }

    static std::vector<std::string> split(const std::string& s) {
        std::vector<std::string> out;
        std::string tok;
        for (char c : s + " ") {
            if (c == ' ' || c == '\t' || c == ',') {
                if (!tok.empty()) out.push_back(tok);
                tok.clear();
            } else {
                tok += c;
            }
        }
        return out;
    }

    static double parse_double(const std::string& s, const std::string& name) {
        try {
            size_t used = 0;
            double v = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            fail("config value '" + s + "' for " + name + " is not a number", 2);
        }
    }

    static int parse_int(const std::string& s, const std::string& name) {
        try {
            size_t used = 0;
            int v = std::stoi(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            fail("config value '" + s + "' for " + name + " is not an integer", 2);
        }
    }

    std::map<std::string, ConfigTarget> targets_;
};

// ---- shared option state -----------------------------------------------

struct Options {
    std::string config;
    std::vector<double> beta;
    std::vector<double> beta_span;  // lo hi count
    double z = 1.0;
    int d = 1;
    std::string stats = "boson";
    std::string w_method = "exact";
    int nmax = 128;
    double cutoff = 0.0;
    std::string out;
    long long seed = 1;
    int monomer_nodes = 0;  // 0 keeps the per-beta default
    int dimer_nodes = 0;
    int use_wh = 1;
    // weight-profile shape
    double point = 0.0;
    double line_max = 4.0;
    int line_points = 41;
    // meanfield-demo chain
    int n_particles = 2;
    double spacing = 1.12246204830937;  // 2^(1/6), the pair-potential minimum
    double k_conf = 0.0;
    int displace_index = -1;
    double displace_pos = 0.0;
    int samples = 3;
};

std::vector<double> resolve_beta_grid(const Options& opt, bool required) {
    std::vector<double> grid = opt.beta;
    if (!opt.beta_span.empty()) {
        if (opt.beta_span.size() != 3) fail("--beta-span needs exactly three values: lo hi count", 2);
        const double lo = opt.beta_span[0], hi = opt.beta_span[1];
        const int count = (int)std::llround(opt.beta_span[2]);
        if (count < 1 || (count == 1 && hi != lo)) fail("--beta-span count must be >= 1 (and > 1 for a range)", 2);
        for (int i = 0; i < count; ++i)
            grid.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
    }
    for (double b : grid)
        if (!(b > 0.0)) fail("beta values must be positive", 2);
    if (required && grid.empty()) fail("the beta grid is empty; pass --beta or --beta-span", 2);
    return grid;
}

qsm_w_evaluator* make_evaluator(const Options& opt) {
    qsm_w_evaluator* ev = nullptr;
    if (opt.w_method == "exact")
        check(qsm_w_evaluator_create_exact(opt.nmax, 1e-12, &ev));
    else if (opt.w_method == "bigw")
        check(qsm_w_evaluator_create_big_w(5, &ev));
    else if (opt.w_method == "smallw")
        check(qsm_w_evaluator_create_small_w(4, &ev));
    else
        fail("unknown --w-method '" + opt.w_method + "'", 2);
    return ev;
}

int stats_sign(const Options& opt) {
    if (opt.stats == "boson") return 1;
    if (opt.stats == "fermion") return -1;
    fail("unknown --stats '" + opt.stats + "'", 2);
}

qsm_grid resolve_grid(double beta, int loop_order, int nodes_override) {
    qsm_grid g = qsm_grid_default(beta, loop_order);
    if (nodes_override > 0) g.nodes_per_axis = nodes_override;
    return g;
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) fail("cannot open output file '" + out_path + "'");
    f.write(text.data(), (std::streamsize)text.size());
    if (!f) fail("write to '" + out_path + "' failed");
}

std::string header_line(const std::string& key, const std::string& value) {
    return "# " + key + " = " + value + "\n";
}

// ---- weight-profile -----------------------------------------------------

// one row per (beta, s) with P = Q = s in every component: the exact
// weighted series next to both truncated expansions and the bare
// Boltzmann factor. several beta values sweep beta at s = --point; a
// single beta traces the s line [0, --line-max].
int run_weight_profile(const Options& opt) {
    const std::vector<double> betas = resolve_beta_grid(opt, true);

    struct Row {
        double beta, s;
    };
    std::vector<Row> rows;
    bool line_mode = betas.size() == 1;
    if (line_mode) {
        if (opt.line_points < 2) fail("--line-points must be at least 2", 2);
        for (int i = 0; i < opt.line_points; ++i)
            rows.push_back({betas[0], opt.line_max * i / (opt.line_points - 1)});
    } else {
        for (double b : betas) rows.push_back({b, opt.point});
    }

    qsm_w_evaluator *exact = nullptr, *bigw = nullptr, *smallw = nullptr;
    check(qsm_w_evaluator_create_exact(opt.nmax, 1e-12, &exact));
    check(qsm_w_evaluator_create_big_w(5, &bigw));
    check(qsm_w_evaluator_create_small_w(4, &smallw));

    std::string text;
    text += "# qsm weight-profile\n";
    text += header_line("mode", line_mode ? "line" : "sweep");
    text += header_line("d", std::to_string(opt.d));
    text += header_line("nmax", std::to_string(opt.nmax));
    if (line_mode) {
        text += header_line("beta", fmt(rows[0].beta));
        text += header_line("line-max", fmt(opt.line_max));
        text += header_line("line-points", std::to_string(opt.line_points));
    } else {
        std::string bs;
        for (const Row& r : rows) bs += (bs.empty() ? "" : " ") + fmt(r.beta);
        text += header_line("beta", bs);
        text += header_line("point", fmt(opt.point));
    }
    text += "beta,P,Q,re_exact,re_bigW,re_smallw,boltzmann\n";

    std::vector<double> pv((size_t)opt.d), qv((size_t)opt.d);
    for (const Row& r : rows) {
        for (int a = 0; a < opt.d; ++a) pv[(size_t)a] = qv[(size_t)a] = r.s;
        double re_e, im_e, re_b, im_b, re_s, im_s;
        check(qsm_w_weighted(exact, pv.data(), qv.data(), opt.d, r.beta, &re_e, &im_e));
        check(qsm_w_weighted(bigw, pv.data(), qv.data(), opt.d, r.beta, &re_b, &im_b));
        check(qsm_w_weighted(smallw, pv.data(), qv.data(), opt.d, r.beta, &re_s, &im_s));
        const double boltz = std::exp(-r.beta * opt.d * r.s * r.s);
        text += fmt(r.beta) + "," + fmt(r.s) + "," + fmt(r.s) + "," + fmt(re_e) + "," + fmt(re_b) +
                "," + fmt(re_s) + "," + fmt(boltz) + "\n";
    }

    qsm_w_evaluator_destroy(exact);
    qsm_w_evaluator_destroy(bigw);
    qsm_w_evaluator_destroy(smallw);
    emit(opt.out, text);
    return 0;
}

// ---- grand-potential ------------------------------------------------------

// signed one- and two-loop contributions to -beta*Omega: the closed-form
// oscillator references next to the phase-space quadrature.
int run_grand_potential(const Options& opt) {
    const std::vector<double> betas = resolve_beta_grid(opt, true);
    const int sign = stats_sign(opt);
    qsm_w_evaluator* ev = make_evaluator(opt);

    std::string text;
    text += "# qsm grand-potential\n";
    text += header_line("z", fmt(opt.z));
    text += header_line("d", std::to_string(opt.d));
    text += header_line("stats", opt.stats);
    text += header_line("w-method", opt.w_method);
    text += header_line("nmax", std::to_string(opt.nmax));
    text += header_line("cutoff", fmt(opt.cutoff));
    text += header_line("monomer-nodes", opt.monomer_nodes > 0 ? std::to_string(opt.monomer_nodes) : "default");
    text += header_line("dimer-nodes", opt.dimer_nodes > 0 ? std::to_string(opt.dimer_nodes) : "default");
    text += "beta,analytic_l1,quad_l1,analytic_l2,quad_l2\n";

    for (double beta : betas) {
        const qsm_thermo ts{beta, opt.z, opt.d, sign};
        double guard_probe;
        check(qsm_grand_potential(&ts, 2, &guard_probe));  // trips the z < exp(d beta / 2) bound

        double a1, a2, q1, q2;
        check(qsm_grand_potential_loop_term(&ts, 1, &a1));
        check(qsm_grand_potential_loop_term(&ts, 2, &a2));
        a2 *= sign;  // signed contribution, matching the quadrature column
        const qsm_grid g1 = resolve_grid(beta, 1, opt.monomer_nodes);
        const qsm_grid g2 = resolve_grid(beta, 2, opt.dimer_nodes);
        check(qsm_monomer_grand_potential(ev, &ts, &g1, &q1));
        check(qsm_loop_grand_potential(ev, 2, &ts, &g2, opt.cutoff, opt.cutoff, &q2));
        text += fmt(beta) + "," + fmt(a1) + "," + fmt(q1) + "," + fmt(a2) + "," + fmt(q2) + "\n";
    }

    qsm_w_evaluator_destroy(ev);
    emit(opt.out, text);
    return 0;
}

// ---- energy ---------------------------------------------------------------

// average energy per row: 50-loop analytic reference against the two-loop
// quadrature, for both statistics side by side.
int run_energy(const Options& opt) {
    const std::vector<double> betas = resolve_beta_grid(opt, true);
    qsm_w_evaluator* ev = make_evaluator(opt);

    std::string text;
    text += "# qsm energy\n";
    text += header_line("z", fmt(opt.z));
    text += header_line("d", std::to_string(opt.d));
    text += header_line("w-method", opt.w_method);
    text += header_line("nmax", std::to_string(opt.nmax));
    text += header_line("cutoff", fmt(opt.cutoff));
    text += header_line("use-wh", std::to_string(opt.use_wh != 0));
    text += header_line("monomer-nodes", opt.monomer_nodes > 0 ? std::to_string(opt.monomer_nodes) : "default");
    text += header_line("dimer-nodes", opt.dimer_nodes > 0 ? std::to_string(opt.dimer_nodes) : "default");
    text += "beta,analytic_50mer_boson,analytic_50mer_fermion,quad_dimer_boson,quad_dimer_fermion\n";

    for (double beta : betas) {
        const qsm_grid gm = resolve_grid(beta, 1, opt.monomer_nodes);
        const qsm_grid gd = resolve_grid(beta, 2, opt.dimer_nodes);
        double row[4];
        int k = 0;
        for (int sign : {1, -1}) {
            const qsm_thermo ts{beta, opt.z, opt.d, sign};
            check(qsm_average_energy(&ts, 50, &row[k]));
            check(qsm_average_energy_loops(ev, 2, &ts, &gm, &gd, opt.cutoff, opt.cutoff,
                                           opt.use_wh, &row[k + 2]));
            ++k;
        }
        text += fmt(beta) + "," + fmt(row[0]) + "," + fmt(row[1]) + "," + fmt(row[2]) + "," +
                fmt(row[3]) + "\n";
    }

    qsm_w_evaluator_destroy(ev);
    emit(opt.out, text);
    return 0;
}

// ---- meanfield-demo ---------------------------------------------------------

// local harmonic analysis of a short 1-D chain: one "mode" row per particle
// (center, frequency, energy offset) and one "weight" row per sampled
// momentum vector with the total mean-field weight. empty fields keep the
// table rectangular across the two row kinds.
int run_meanfield_demo(const Options& opt) {
    std::vector<double> betas = resolve_beta_grid(opt, false);
    if (betas.empty()) betas.push_back(1.0);
    if (betas.size() != 1) fail("meanfield-demo uses a single beta", 2);
    const double beta = betas[0];

    qsm_chain* chain = nullptr;
    check(qsm_chain_create(opt.n_particles, opt.spacing, opt.k_conf, &chain));
    if (opt.displace_index >= 0) {
        const qsm_status st = qsm_chain_displace(chain, opt.displace_index, opt.displace_pos);
        if (st != QSM_OK) {
            qsm_chain_destroy(chain);
            check(st);
        }
    }

    std::string text;
    text += "# qsm meanfield-demo\n";
    text += header_line("n", std::to_string(opt.n_particles));
    text += header_line("spacing", fmt(opt.spacing));
    text += header_line("kconf", fmt(opt.k_conf));
    text += header_line("beta", fmt(beta));
    text += header_line("nmax", std::to_string(opt.nmax));
    text += header_line("samples", std::to_string(opt.samples));
    text += header_line("seed", std::to_string(opt.seed));
    if (opt.displace_index >= 0)
        text += header_line("displaced", std::to_string(opt.displace_index) + " -> " + fmt(opt.displace_pos));
    text += "kind,index,valid,qbar,omega,ubar,re_weight,im_weight\n";

    for (int j = 0; j < opt.n_particles; ++j) {
        int valid;
        double qbar, ubar, omega;
        const qsm_status st = qsm_chain_mode(chain, j, &valid, &qbar, &ubar, &omega);
        if (st != QSM_OK) {
            qsm_chain_destroy(chain);
            check(st);
        }
        if (valid)
            text += "mode," + std::to_string(j) + ",1," + fmt(qbar) + "," + fmt(omega) + "," +
                    fmt(ubar) + ",,\n";
        else
            text += "mode," + std::to_string(j) + ",0,,,,,\n";
    }

    // thermal momenta, sd 1/sqrt(beta); fixed seed keeps the table reproducible
    std::mt19937_64 rng((uint64_t)opt.seed);
    std::normal_distribution<double> momentum(0.0, 1.0 / std::sqrt(beta));
    std::vector<double> p((size_t)opt.n_particles);
    for (int i = 0; i < opt.samples; ++i) {
        for (double& pj : p) pj = momentum(rng);
        double re, im;
        const qsm_status st =
            qsm_chain_weight(chain, beta, p.data(), opt.n_particles, opt.nmax, 1e-12, &re, &im);
        if (st != QSM_OK) {
            qsm_chain_destroy(chain);
            check(st);
        }
        text += "weight," + std::to_string(i) + ",,,,," + fmt(re) + "," + fmt(im) + "\n";
    }

    qsm_chain_destroy(chain);
    emit(opt.out, text);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"phase space statistical mechanics of quantum oscillator gases"};
    app.require_subcommand(1);

    Options opt;
    std::map<std::string, ConfigBinder> binders;  // per command: option names collide across them
    auto binder_of = [&](CLI::App* sub) -> ConfigBinder& { return binders[sub->get_name()]; };

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "INI file with [command] sections of key = value defaults");
        binder_of(sub).bind(sub->add_option("--out", opt.out, "write the CSV here instead of stdout"), &opt.out);
    };
    auto add_beta = [&](CLI::App* sub) {
        binder_of(sub).bind(sub->add_option("--beta", opt.beta, "inverse temperature grid"), &opt.beta);
        binder_of(sub).bind(sub->add_option("--beta-span", opt.beta_span,
                                            "lo hi count: evenly spaced beta values appended to --beta")
                                ->expected(3),
                            &opt.beta_span);
    };
    auto add_thermo = [&](CLI::App* sub) {
        binder_of(sub).bind(sub->add_option("--z", opt.z, "fugacity"), &opt.z);
        binder_of(sub).bind(sub->add_option("--d", opt.d, "spatial dimension")->check(CLI::Range(1, 3)),
                            &opt.d);
    };
    auto add_method = [&](CLI::App* sub) {
        binder_of(sub).bind(sub->add_option("--w-method", opt.w_method, "weight evaluator: exact, bigw, smallw")
                                ->check(CLI::IsMember({"exact", "bigw", "smallw"})),
                            &opt.w_method);
        binder_of(sub).bind(sub->add_option("--nmax", opt.nmax, "exact-series truncation level"), &opt.nmax);
    };
    auto add_grid = [&](CLI::App* sub) {
        binder_of(sub).bind(sub->add_option("--cutoff", opt.cutoff,
                                            "distance window R applied to loop coordinates (0 = off)"),
                            &opt.cutoff);
        binder_of(sub).bind(sub->add_option("--monomer-nodes", opt.monomer_nodes,
                                            "quadrature nodes per axis for the one-loop table"),
                            &opt.monomer_nodes);
        binder_of(sub).bind(sub->add_option("--dimer-nodes", opt.dimer_nodes,
                                            "quadrature nodes per axis for the two-loop table"),
                            &opt.dimer_nodes);
    };

    CLI::App* wp = app.add_subcommand("weight-profile",
                                      "tabulate the weighted commutation function along beta or P = Q");
    add_common(wp);
    add_beta(wp);
    binder_of(wp).bind(wp->add_option("--d", opt.d, "spatial dimension")->check(CLI::Range(1, 3)), &opt.d);
    binder_of(wp).bind(wp->add_option("--nmax", opt.nmax, "exact-series truncation level"), &opt.nmax);
    binder_of(wp).bind(wp->add_option("--point", opt.point, "P = Q value held fixed while beta sweeps"),
                       &opt.point);
    binder_of(wp).bind(wp->add_option("--line-max", opt.line_max, "end of the P = Q line (single beta)"),
                       &opt.line_max);
    binder_of(wp).bind(wp->add_option("--line-points", opt.line_points, "points on the P = Q line"),
                       &opt.line_points);

    CLI::App* gp = app.add_subcommand("grand-potential",
                                      "analytic vs quadrature loop terms of -beta*Omega");
    add_common(gp);
    add_beta(gp);
    add_thermo(gp);
    binder_of(gp).bind(gp->add_option("--stats", opt.stats, "boson or fermion")
                           ->check(CLI::IsMember({"boson", "fermion"})),
                       &opt.stats);
    add_method(gp);
    add_grid(gp);

    CLI::App* en = app.add_subcommand("energy",
                                      "average energy: 50-loop analytic vs two-loop quadrature, both statistics");
    add_common(en);
    add_beta(en);
    add_thermo(en);
    add_method(en);
    add_grid(en);
    binder_of(en).bind(en->add_option("--use-wh", opt.use_wh,
                                      "1 routes through the energy-weighted series, 0 differentiates the plain one"),
                       &opt.use_wh);

    CLI::App* mf = app.add_subcommand("meanfield-demo",
                                      "local harmonic modes and mean-field weight of a short chain");
    add_common(mf);
    add_beta(mf);
    binder_of(mf).bind(mf->add_option("--n", opt.n_particles, "chain length"), &opt.n_particles);
    binder_of(mf).bind(mf->add_option("--spacing", opt.spacing, "initial lattice spacing"), &opt.spacing);
    binder_of(mf).bind(mf->add_option("--kconf", opt.k_conf, "harmonic confinement strength"), &opt.k_conf);
    binder_of(mf).bind(mf->add_option("--displace-index", opt.displace_index, "particle moved before analysis"),
                       &opt.displace_index);
    binder_of(mf).bind(mf->add_option("--displace-pos", opt.displace_pos, "its new position"), &opt.displace_pos);
    binder_of(mf).bind(mf->add_option("--samples", opt.samples, "momentum draws for the weight rows"), &opt.samples);
    binder_of(mf).bind(mf->add_option("--seed", opt.seed, "seed for the momentum draws"), &opt.seed);
    binder_of(mf).bind(mf->add_option("--nmax", opt.nmax, "exact-series truncation level"), &opt.nmax);

    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::CallForHelp&) {
            const auto parsed = app.get_subcommands();
            std::printf("%s", (parsed.empty() ? app.help() : parsed.front()->help()).c_str());
            return 0;
        } catch (const CLI::ParseError& e) {
            fail(e.what(), 2);
        }

        CLI::App* sub = app.get_subcommands().front();
        if (!opt.config.empty()) binder_of(sub).apply(load_config(opt.config), sub->get_name());

        if (sub == wp) return run_weight_profile(opt);
        if (sub == gp) return run_grand_potential(opt);
        if (sub == en) return run_energy(opt);
        return run_meanfield_demo(opt);
    } catch (const CliError& e) {
        std::fprintf(stderr, "qsm: %s\n", e.message.c_str());
        return e.code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "qsm: %s\n", e.what());
        return 1;
    }
}
