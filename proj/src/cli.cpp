#include "ptdirac/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <unistd.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "ptdirac/mapping.hpp"
#include "ptdirac/oracle.hpp"
#include "ptdirac/quadrature.hpp"

namespace ptdirac::cli {

using json = nlohmann::json;

namespace {

std::string g12(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& key, const std::string& v)
{
    double out = 0.0;
    const char* end = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || p != end || !std::isfinite(out))
        throw ConfigError("config: '" + key + "' is not a finite number: '" + v + "'");
    return out;
}

int parse_int(const std::string& key, const std::string& v)
{
    int out = 0;
    const char* end = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || p != end)
        throw ConfigError("config: '" + key + "' is not an integer: '" + v + "'");
    return out;
}

class Reader {
public:
    explicit Reader(const std::map<std::string, std::string>& kv) : kv_(kv) {}

    std::optional<std::string> str(const std::string& k)
    {
        used_.insert(k);
        auto it = kv_.find(k);
        if (it == kv_.end())
            return std::nullopt;
        return it->second;
    }
    double num(const std::string& k, double def)
    {
        auto v = str(k);
        return v ? parse_double(k, *v) : def;
    }
    std::optional<int> integer(const std::string& k)
    {
        auto v = str(k);
        if (!v)
            return std::nullopt;
        return parse_int(k, *v);
    }
    void reject_unknown() const
    {
        for (const auto& [k, v] : kv_)
            if (!used_.count(k))
                throw ConfigError("config: unknown key '" + k + "'");
    }

private:
    const std::map<std::string, std::string>& kv_;
    std::set<std::string> used_;
};

// x, re_M, im_M, re_P, im_P, re_V, im_V per line
SampledCouplings read_samples(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("generic.file: cannot open '" + path + "'");
    std::vector<double> xs;
    SampledCouplings s;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = trim(line);
        if (t.empty() || t[0] == '#' || std::isalpha(static_cast<unsigned char>(t[0])))
            continue;
        std::vector<double> f;
        std::stringstream ss(t);
        std::string cell;
        while (std::getline(ss, cell, ','))
            f.push_back(parse_double(path + ":" + std::to_string(lineno), trim(cell)));
        if (f.size() != 7)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 7 columns, got " +
                              std::to_string(f.size()));
        xs.push_back(f[0]);
        s.M.emplace_back(f[1], f[2]);
        s.P.emplace_back(f[3], f[4]);
        s.Vt.emplace_back(f[5], f[6]);
    }
    if (xs.size() < 8)
        throw ConfigError("generic.file: need at least 8 sample rows");
    s.grid = GridSpec::uniform(xs.front(), xs.back(), static_cast<int>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (std::abs(xs[i] - s.grid.x(static_cast<int>(i))) > 1e-9 * (1.0 + std::abs(xs[i])))
            throw ConfigError("generic.file: x column must be uniformly spaced");
    return s;
}

json grid_json(const GridSpec& g)
{
    return {{"x_min", g.x_min}, {"x_max", g.x_max}, {"n", g.n}};
}

json header(const RunConfig& cfg, const std::string& command)
{
    return {{"command", command}, {"family", cfg.family_name}, {"params", cfg.values}, {"grid", grid_json(cfg.grid)}};
}

std::string csv_provenance(const RunConfig& cfg, const std::string& command, const std::string& extra = {})
{
    std::ostringstream os;
    os << "# ptdirac " << command << " family=" << cfg.family_name << " grid=[" << g12(cfg.grid.x_min) << ","
       << g12(cfg.grid.x_max) << "] n=" << cfg.grid.n;
    for (const auto& [k, v] : cfg.values)
        if (k != "family" && k.rfind("grid.", 0) != 0)
            os << ' ' << k << '=' << v;
    if (!extra.empty())
        os << ' ' << extra;
    os << '\n';
    return os.str();
}

std::string csv_quote(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

// ---- closed forms and oracles --------------------------------------------

Spectrum closed_spectrum(const RunConfig& cfg)
{
    switch (cfg.family.tag()) {
    case FamilyTag::Quadratic: return quadratic_spectrum(cfg.family, cfg.n_max);
    case FamilyTag::Oscillator: return oscillator_spectrum(cfg.family, cfg.n_max);
    case FamilyTag::RosenMorse: {
        auto sp = rosen_morse_spectrum(cfg.family);
        std::erase_if(sp.states, [&](const SpectrumState& s) { return s.n > cfg.n_max; });
        return sp;
    }
    case FamilyTag::GenericSampled: break;
    }
    return {};
}

DiracOptions dirac_options(const RunConfig& cfg, const Spectrum* closed)
{
    DiracOptions o;
    o.window_lo = cfg.window_lo;
    o.window_hi = cfg.window_hi;
    if (closed && !closed->states.empty()) {
        double lo = 1e300, hi = -1e300;
        for (const auto& s : closed->states)
            if (std::isfinite(s.energy)) {
                lo = std::min(lo, s.energy);
                hi = std::max(hi, s.energy);
            }
        if (lo <= hi) {
            o.window_lo = std::max(o.window_lo, lo - 0.5);
            o.window_hi = std::min(o.window_hi, hi + 0.5);
        }
    }
    return o;
}

struct Comparison {
    SpectrumState closed;
    std::string oracle_name; // shooting or fixed_point
    bool oracle_found = false;
    double oracle_energy = 0.0;
    double oracle_diff = 0.0;
    bool dirac_found = false;
    double dirac_energy = 0.0;
    double dirac_diff = 0.0;
    bool pass = false;
    std::string note;
};

struct Verification {
    std::vector<Comparison> rows;
    Spectrum dirac;
    std::optional<std::string> dirac_error;
    bool pass = true;
};

const SpectrumState* nearest(const Spectrum& sp, double E, int branch)
{
    const SpectrumState* best = nullptr;
    for (const auto& s : sp.states)
        if (s.branch == branch && (!best || std::abs(s.energy - E) < std::abs(best->energy - E)))
            best = &s;
    return best;
}

Verification compare_oracles(const RunConfig& cfg, const Spectrum& closed)
{
    Verification v;
    try {
        v.dirac = dirac_spectrum(cfg.family, cfg.grid, dirac_options(cfg, &closed));
    } catch (const NumericalError& e) {
        v.dirac_error = e.what();
        v.pass = false;
    }
    const bool e_dep = cfg.family.tag() == FamilyTag::Quadratic;
    const double v0 = cfg.family.v0();
    const auto prob = e_dep ? std::optional<EffectiveProblem>{} : EffectiveProblem::from_family(cfg.family);

    for (const auto& st : closed.states) {
        Comparison c;
        c.closed = st;
        c.oracle_name = e_dep ? "fixed_point" : "shooting";
        if (!std::isfinite(st.energy)) {
            c.pass = true;
            c.note = "no real closed-form energy";
            v.rows.push_back(c);
            continue;
        }
        const SpectrumState* d = v.dirac_error ? nullptr : nearest(v.dirac, st.energy, st.branch);
        if (d) {
            c.dirac_found = true;
            c.dirac_energy = d->energy;
            c.dirac_diff = std::abs(d->energy - st.energy);
        }
        if (!st.valid) {
            // a rejected root must not show up as a localized state
            c.pass = !v.dirac_error && !(c.dirac_found && c.dirac_diff < 0.05);
            c.note = c.pass ? "spurious root: no localized state within 0.05" : "localized state near rejected root";
            if (e_dep) {
                try {
                    const auto fp = fixed_point_energy(cfg.family, st.n, st.energy);
                    c.oracle_found = true;
                    c.oracle_energy = fp.energy;
                    c.oracle_diff = std::abs(fp.energy - st.energy);
                } catch (const NumericalError&) {
                    c.oracle_found = false;
                }
            }
            v.rows.push_back(c);
            v.pass = v.pass && c.pass;
            continue;
        }
        try {
            if (e_dep) {
                const auto fp = fixed_point_energy(cfg.family, st.n, st.energy);
                c.oracle_found = true;
                c.oracle_energy = fp.energy;
            } else {
                // bracket a quarter of the way to the neighbouring levels
                const double lvl = std::abs(st.energy - v0);
                double gap = 0.05 * (1.0 + lvl);
                for (const auto& o : closed.states)
                    if (&o != &st && o.branch == st.branch && std::isfinite(o.energy) && o.energy != st.energy)
                        gap = std::min(gap, 0.25 * std::abs(o.energy - st.energy));
                const double a = v0 + st.branch * std::max(lvl - gap, 1e-9);
                const double b = v0 + st.branch * (lvl + gap);
                const auto r = shoot_effective(*prob, cfg.grid, std::min(a, b), std::max(a, b));
                c.oracle_found = r.found;
                c.oracle_energy = r.energy;
                if (!r.found)
                    c.note = r.message;
            }
        } catch (const NumericalError& e) {
            c.note = e.what();
        } catch (const PreconditionError& e) {
            c.note = e.what();
        }
        if (c.oracle_found)
            c.oracle_diff = std::abs(c.oracle_energy - st.energy);
        c.pass = c.oracle_found && c.oracle_diff <= cfg.tol && c.dirac_found && c.dirac_diff <= cfg.dirac_tol;
        if (!c.dirac_found && c.note.empty())
            c.note = v.dirac_error ? "matrix oracle failed" : "no matrix-oracle state on this branch";
        v.rows.push_back(c);
        v.pass = v.pass && c.pass;
    }
    return v;
}

json state_json(const SpectrumState& s)
{
    json j = {{"n", s.n},
              {"E", s.energy},
              {"branch", s.branch},
              {"valid", s.valid},
              {"residual", s.residual},
              {"provenance", to_string(s.provenance)}};
    if (!s.note.empty())
        j["note"] = s.note;
    return j;
}

json comparison_json(const Comparison& c)
{
    auto rel = [&](double d) { return d / std::max(std::abs(c.closed.energy), 1e-300); };
    json j = {{"n", c.closed.n},     {"branch", c.closed.branch}, {"valid", c.closed.valid},
              {"closed_form", c.closed.energy}, {"pass", c.pass}};
    json o = {{"found", c.oracle_found}};
    if (c.oracle_found) {
        o["E"] = c.oracle_energy;
        o["abs_diff"] = c.oracle_diff;
        o["rel_diff"] = rel(c.oracle_diff);
    }
    j[c.oracle_name] = o;
    json d = {{"found", c.dirac_found}};
    if (c.dirac_found) {
        d["E"] = c.dirac_energy;
        d["abs_diff"] = c.dirac_diff;
        d["rel_diff"] = rel(c.dirac_diff);
    }
    j["dirac"] = d;
    if (!c.note.empty())
        j["note"] = c.note;
    return j;
}

// ---- spinors ---------------------------------------------------------------

struct SpinorRun {
    SpinorOnGrid sp;
    std::string source;
    std::string extra; // for the provenance line
    json info = json::object();
};

void normalise(SpinorOnGrid& sp)
{
    const double nrm = quadrature_norm(sp);
    if (!(nrm > 0.0))
        throw NumericalError("spinor has zero norm on the grid");
    const double s = 1.0 / std::sqrt(nrm);
    for (int i = 0; i < sp.grid.n; ++i) {
        sp.psi_plus[i] *= s;
        sp.psi_minus[i] *= s;
    }
    sp.norm = quadrature_norm(sp);
}

SpinorRun oracle_spinor(const RunConfig& cfg, int n)
{
    double guess = 0.0;
    if (cfg.family.tag() == FamilyTag::Quadratic) {
        auto wide = cfg;
        wide.n_max = std::max(cfg.n_max, n);
        const auto closed = closed_spectrum(wide);
        const SpectrumState* hit = nullptr;
        for (const auto& s : closed.states)
            if (s.n == n && s.branch == cfg.branch && s.valid)
                hit = &s;
        if (!hit)
            throw DomainError("no valid closed-form level n=" + std::to_string(n) + " on this branch");
        guess = hit->energy;
    } else {
        const auto sp = dirac_spectrum(cfg.family, cfg.grid, dirac_options(cfg, nullptr));
        const SpectrumState* hit = nullptr;
        for (const auto& s : sp.states)
            if (s.n == n && s.branch == cfg.branch)
                hit = &s;
        if (!hit)
            throw DomainError("matrix oracle has no localized level n=" + std::to_string(n) + " on this branch");
        guess = hit->energy;
    }
    DiracOptions opt;
    const auto gauge = resolve_gauge(cfg.family, cfg.grid, opt.gauge);
    const auto pots = family_builder(cfg.family, gauge)(cfg.grid);
    const auto ep = refine_eigenpair(pots, guess, opt.stencil, opt.stabilizer, opt.edge_fraction);
    SpinorRun r;
    r.sp.grid = cfg.grid;
    r.sp.psi_plus = ep.psi_plus;
    r.sp.psi_minus = ep.psi_minus;
    r.sp.energy = ep.energy.real();
    normalise(r.sp);
    r.sp.tail_flag = ep.edge_weight > opt.localization;
    r.source = "dirac_oracle";
    r.extra = "gauge=" + to_string(gauge);
    if (gauge == VectorGauge::Absorbed)
        r.extra += " (components phi_+ = psi_+/sqrt(A_+), phi_- = sqrt(A_+) psi_-)";
    r.info = {{"gauge", to_string(gauge)}, {"edge_weight", ep.edge_weight}, {"im_energy", ep.energy.imag()}};
    return r;
}

SpinorRun build_spinor(const RunConfig& cfg)
{
    const int n = cfg.require_n();
    switch (cfg.family.tag()) {
    case FamilyTag::Oscillator: {
        SpinorRun r;
        r.sp = oscillator_spinor(cfg.family, n, cfg.branch, cfg.grid, cfg.form);
        const auto k = oscillator_constants(cfg.family);
        r.source = "closed_form";
        r.extra = std::string("form=") + (cfg.form == SpinorForm::AsPrinted ? "printed" : "consistent") +
                  " variable=y x=y-" + g12(k.shift_imag) + "i";
        r.info = {{"form", cfg.form == SpinorForm::AsPrinted ? "printed" : "consistent"},
                  {"variable", "y"},
                  {"shift_imag", -k.shift_imag}};
        return r;
    }
    case FamilyTag::RosenMorse: {
        auto rep = rosen_morse_spinor(cfg.family, n, cfg.branch, cfg.grid);
        const bool use_oracle = cfg.source == "oracle" || (cfg.source == "auto" && rep.form_suspect);
        if (use_oracle && !rep.oracle)
            throw NumericalError("rosen-morse: no oracle eigenfunction available: " + rep.summary);
        SpinorRun r;
        r.sp = use_oracle ? *rep.oracle : rep.printed;
        r.source = use_oracle ? "shooting_oracle" : "printed_form";
        r.extra = std::string("form_suspect=") + (rep.form_suspect ? "true" : "false");
        r.info = {{"form_suspect", rep.form_suspect},
                  {"residual", rep.residual},
                  {"residual_refined", rep.residual_refined},
                  {"summary", rep.summary}};
        return r;
    }
    default: return oracle_spinor(cfg, n);
    }
}

// ---- verification checks ------------------------------------------------

struct Check {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double limit = 0.0;
    std::string detail;
};

GridSpec pt_grid(const RunConfig& cfg)
{
    if (cfg.family.tag() == FamilyTag::GenericSampled)
        return cfg.family.samples().grid;
    return GridSpec::symmetric(cfg.grid.x_max, 2001);
}

double reference_energy(const RunConfig& cfg)
{
    const auto sp = closed_spectrum(cfg);
    for (const auto& s : sp.states)
        if (s.valid && std::isfinite(s.energy))
            return s.energy;
    return 1.0;
}

std::vector<Check> pt_checks(const RunConfig& cfg)
{
    std::vector<Check> out;
    const auto g = pt_grid(cfg);
    const auto rep = pt_check(cfg.family, g, 1e-10);
    out.push_back({"pt_check", rep.pass, rep.max_violation(), rep.tol,
                   rep.pass ? "couplings obey the parity rules" : "worst component: " + rep.worst()});

    const double E = reference_energy(cfg);
    double worst = 0.0;
    if (cfg.family.analytic()) {
        for (int i = 0; i < g.n; ++i) {
            const double x = g.x(i);
            worst = std::max(worst, std::abs(effective_potential(cfg.family, E, -x) -
                                             std::conj(effective_potential(cfg.family, E, x))));
        }
    } else {
        const auto prob = EffectiveProblem::from_family(cfg.family);
        for (int i = 0; i < g.n; ++i)
            worst = std::max(worst, std::abs(prob(g.x(g.n - 1 - i), E) - std::conj(prob(g.x(i), E))));
    }
    const double lim = cfg.family.analytic() ? 1e-12 : 1e-10;
    out.push_back({"veff_pt", worst < lim, worst, lim, "max |V_eff(-x) - conj V_eff(x)| at E=" + g12(E)});
    return out;
}

void oscillator_checks(const RunConfig& cfg, std::vector<Check>& out)
{
    const auto k = oscillator_constants(cfg.family);
    if (k.lambda == 0.0) {
        out.push_back({"norm", true, 0.0, 0.0, "lambda = 0: states are not normalisable, norm checks skipped"});
    } else {
        for (int n = 0; n <= std::min(1, cfg.n_max); ++n) {
            const auto nr = oscillator_norm(cfg.family, n, cfg.form);
            out.push_back({"norm.closed_vs_quadrature n=" + std::to_string(n), nr.rel_diff <= 1e-8, nr.rel_diff,
                           1e-8, "N=" + g12(*nr.closed_form)});
            const auto sp = oscillator_spinor(cfg.family, n, cfg.branch, cfg.grid, cfg.form, nr.closed_form);
            const double d = std::abs(quadrature_norm(sp) - 1.0);
            const auto printed = oscillator_spinor(cfg.family, n, cfg.branch, cfg.grid, cfg.form,
                                                   oscillator_norm_printed(cfg.family, n));
            out.push_back({"norm.unit n=" + std::to_string(n), d <= 1e-6, d, 1e-6,
                           "integral with the N as typeset: " + g12(quadrature_norm(printed))});
        }
    }
    const bool zero_node = k.lambda == 0.0 && cfg.grid.node_index(0.0) >= 0;
    for (int n = 0; n <= std::min(2, cfg.n_max) && !zero_node; ++n) {
        const double E = cfg.family.v0() + cfg.branch * oscillator_level(cfg.family, n);
        const auto a = oscillator_spinor(cfg.family, n, cfg.branch, cfg.grid, cfg.form);
        const auto b = oscillator_spinor(cfg.family, n, cfg.branch, cfg.grid.refined(), cfg.form);
        const double r1 = residual_check(a, cfg.family, E), r2 = residual_check(b, cfg.family, E);
        const double ratio = r1 / r2;
        out.push_back({"residual.convergence n=" + std::to_string(n), ratio >= 3.5 && ratio <= 4.5, ratio, 4.0,
                       "residual " + g12(r1) + " -> " + g12(r2) + " under h/2"});
        if (n == 0) {
            const double w1 = residual_check(a, cfg.family, E + 0.1), w2 = residual_check(b, cfg.family, E + 0.1);
            const bool ok = w1 > 1e-2 && w2 > 0.5 * w1;
            out.push_back({"residual.wrong_energy", ok, w2, 1e-2,
                           "E+0.1: residual " + g12(w1) + " -> " + g12(w2) + " under h/2"});
        }
    }
}

void quadratic_checks(const RunConfig& cfg, std::vector<Check>& out)
{
    const auto sp = closed_spectrum(cfg);
    const auto& p = cfg.family.quadratic_params();
    for (const auto& s : sp.states) {
        const double r = quadratic_unsquared_residual(p, s.n, s.energy);
        const bool consistent = p.b1 != 0.0 || s.valid == (std::abs(r) < 1e-8 * (1.0 + std::abs(s.energy)));
        out.push_back({"root_validation n=" + std::to_string(s.n) + " E=" + g12(s.energy), consistent, r, 1e-8,
                       s.valid ? "accepted" : "rejected: " + s.note});
    }
}

void rosen_morse_checks(const RunConfig& cfg, std::vector<Check>& out)
{
    const auto rep = rosen_morse_reality_check(cfg.family);
    const auto sp = rosen_morse_spectrum(cfg.family);
    const bool all_real = std::all_of(sp.states.begin(), sp.states.end(), [](const auto& s) { return s.valid; });
    out.push_back({"reality_conditions", !rep.satisfied || all_real, rep.delta, 0.0, rep.summary});
    if (sp.states.empty())
        return;
    const auto adj = rosen_morse_spinor(cfg.family, 0, cfg.branch, cfg.grid);
    const bool definitive = !adj.form_suspect || adj.oracle.has_value();
    out.push_back({"spinor_adjudication n=0", definitive, adj.residual_refined, 1e-3, adj.summary});
}

std::string checks_text(const RunConfig& cfg, const std::vector<Check>& checks, Format fmt, const std::string& cmd,
                        bool pass, const json& extra = json::object())
{
    if (fmt == Format::Records) {
        json j = header(cfg, cmd);
        j["checks"] = json::array();
        for (const auto& c : checks)
            j["checks"].push_back(
                {{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"limit", c.limit}, {"detail", c.detail}});
        for (auto it = extra.begin(); it != extra.end(); ++it)
            j[it.key()] = it.value();
        j["pass"] = pass;
        return j.dump(2) + "\n";
    }
    std::string s = csv_provenance(cfg, cmd, std::string("pass=") + (pass ? "true" : "false"));
    s += "check,pass,value,limit,detail\n";
    for (const auto& c : checks)
        s += csv_quote(c.name) + "," + (c.pass ? "true" : "false") + "," + g12(c.value) + "," + g12(c.limit) + "," +
             csv_quote(c.detail) + "\n";
    return s;
}

} // namespace

// ---- config -----------------------------------------------------------------

std::map<std::string, std::string> parse_key_values(std::string_view text)
{
    std::map<std::string, std::string> kv;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        const auto t = trim(line);
        if (t.empty())
            continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const auto k = trim(std::string_view(t).substr(0, eq));
        const auto v = trim(std::string_view(t).substr(eq + 1));
        if (k.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (!kv.emplace(k, v).second)
            throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + k + "'");
    }
    return kv;
}

int RunConfig::require_n() const
{
    if (!n)
        throw ConfigError("config: this command needs 'n'");
    if (*n < 0)
        throw ConfigError("config: 'n' must be >= 0");
    return *n;
}

RunConfig make_config(const std::map<std::string, std::string>& kv, const Overrides& ov, const std::string& base_dir)
{
    RunConfig c;
    c.values = kv;
    Reader r(kv);
    const auto fam = r.str("family");
    if (!fam)
        throw ConfigError("config: missing 'family'");
    c.family_name = *fam;
    const double v0 = r.num("v0", 0.0);
    double box = 10.0;
    if (*fam == "quadratic") {
        c.family = CouplingFamily::quadratic({r.num("quad.a1", 0.0), r.num("quad.b1", 0.0), r.num("quad.a2", 1.0)});
        if (v0 != 0.0)
            throw ConfigError("config: the quadratic family has no constant v0");
        box = 8.0;
        c.n_max = 0;
    } else if (*fam == "oscillator") {
        c.family = CouplingFamily::oscillator(
            {r.num("osc.omega1", 0.0), r.num("osc.m1", 0.0), r.num("osc.omega2", 1.0), r.num("osc.m2", 0.0)}, v0);
        box = 12.0;
        c.n_max = 2;
    } else if (*fam == "rosen_morse" || *fam == "rosen-morse") {
        c.family_name = "rosen_morse";
        c.family = CouplingFamily::rosen_morse(
            {r.num("rm.M0", 0.0), r.num("rm.M1", 0.0), r.num("rm.P0", 0.0), r.num("rm.P1", 1.0), r.num("rm.mu", 1.0)},
            v0);
        box = 60.0;
        c.n_max = 1 << 20;
    } else if (*fam == "generic") {
        auto f = r.str("generic.file");
        if (!f)
            throw ConfigError("config: generic family needs 'generic.file'");
        std::filesystem::path p(*f);
        if (p.is_relative())
            p = std::filesystem::path(base_dir) / p;
        c.family = CouplingFamily::sampled(read_samples(p.string()));
        if (v0 != 0.0)
            throw ConfigError("config: put a constant vector potential into the V columns of generic.file");
        c.n_max = 0;
    } else {
        throw ConfigError("config: unknown family '" + *fam + "' (quadratic, oscillator, rosen_morse, generic)");
    }

    if (auto nm = r.integer("n_max")) {
        if (*nm < 0)
            throw ConfigError("config: 'n_max' must be >= 0");
        c.n_max = *nm;
    }
    c.n = r.integer("n");
    if (auto b = r.str("branch")) {
        if (*b == "+1" || *b == "1" || *b == "+")
            c.branch = +1;
        else if (*b == "-1" || *b == "-")
            c.branch = -1;
        else
            throw ConfigError("config: 'branch' must be +1 or -1");
    }
    c.tol = r.num("tol", c.tol);
    c.dirac_tol = r.num("dirac_tol", c.dirac_tol);
    if (auto f = r.str("spinor.form")) {
        if (*f == "consistent")
            c.form = SpinorForm::DiracConsistent;
        else if (*f == "printed")
            c.form = SpinorForm::AsPrinted;
        else
            throw ConfigError("config: 'spinor.form' must be consistent or printed");
    }
    if (auto s = r.str("spinor.source")) {
        if (*s != "auto" && *s != "printed" && *s != "oracle")
            throw ConfigError("config: 'spinor.source' must be auto, printed or oracle");
        c.source = *s;
    }
    c.window_lo = r.num("window.lo", c.window_lo);
    c.window_hi = r.num("window.hi", c.window_hi);
    if (!(c.window_lo <= c.window_hi))
        throw ConfigError("config: window.lo must not exceed window.hi");

    int gn = r.integer("grid.n").value_or(4001);
    box = r.num("grid.box", box);
    if (ov.grid_n)
        gn = *ov.grid_n;
    if (ov.box)
        box = *ov.box;
    if (ov.tol)
        c.tol = *ov.tol;
    if (!(c.tol > 0.0) || !(c.dirac_tol > 0.0))
        throw ConfigError("config: tolerances must be positive");
    if (c.family.tag() == FamilyTag::GenericSampled) {
        if (kv.count("grid.n") || kv.count("grid.box") || ov.grid_n || ov.box)
            throw ConfigError("config: the generic family runs on the grid of its sample file");
        c.grid = c.family.samples().grid;
    } else {
        if (!(box > 0.0))
            throw ConfigError("config: grid.box must be positive");
        c.grid = GridSpec::symmetric(box, gn);
    }
    r.reject_unknown();
    return c;
}

RunConfig load_config(const std::string& path, const Overrides& ov)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    const auto dir = std::filesystem::path(path).parent_path().string();
    return make_config(parse_key_values(ss.str()), ov, dir.empty() ? "." : dir);
}

// ---- commands -----------------------------------------------------------------

Output cmd_spectrum(const RunConfig& cfg, Format fmt, bool verify)
{
    Output out;
    Spectrum sp;
    std::optional<Verification> ver;
    std::optional<std::string> oracle_error;
    if (cfg.family.tag() == FamilyTag::GenericSampled) {
        try {
            sp = dirac_spectrum(cfg.family, cfg.grid, dirac_options(cfg, nullptr));
        } catch (const NumericalError& e) {
            oracle_error = e.what();
        }
    } else {
        sp = closed_spectrum(cfg);
        if (verify)
            ver = compare_oracles(cfg, sp);
    }
    if (oracle_error || (ver && ver->dirac_error))
        out.exit_code = NumericalFailure;
    else if (ver && !ver->pass)
        out.exit_code = VerifyFailed;

    if (fmt == Format::Records) {
        json j = header(cfg, "spectrum");
        j["states"] = json::array();
        for (const auto& s : sp.states)
            j["states"].push_back(state_json(s));
        j["diagnostics"] = sp.diagnostics;
        if (oracle_error) {
            j["partial"] = true;
            j["error"] = *oracle_error;
        }
        if (ver) {
            j["comparisons"] = json::array();
            for (const auto& c : ver->rows)
                j["comparisons"].push_back(comparison_json(c));
            j["dirac_states"] = json::array();
            for (const auto& s : ver->dirac.states)
                j["dirac_states"].push_back(state_json(s));
            j["dirac_diagnostics"] = ver->dirac.diagnostics;
            if (ver->dirac_error) {
                j["partial"] = true;
                j["error"] = *ver->dirac_error;
            }
            j["tolerances"] = {{"oracle", cfg.tol}, {"dirac", cfg.dirac_tol}};
            j["pass"] = ver->pass;
        }
        out.text = j.dump(2) + "\n";
        return out;
    }
    std::string s = csv_provenance(cfg, "spectrum", oracle_error ? "partial=true" : "");
    if (!ver) {
        s += "n,branch,E,valid,residual,provenance,note\n";
        for (const auto& st : sp.states)
            s += std::to_string(st.n) + "," + std::to_string(st.branch) + "," + g12(st.energy) + "," +
                 (st.valid ? "true" : "false") + "," + g12(st.residual) + "," + to_string(st.provenance) + "," +
                 csv_quote(st.note) + "\n";
    } else {
        s += "n,branch,E_closed_form,valid,oracle,E_oracle,diff_oracle,E_dirac,diff_dirac,pass\n";
        for (const auto& c : ver->rows)
            s += std::to_string(c.closed.n) + "," + std::to_string(c.closed.branch) + "," + g12(c.closed.energy) +
                 "," + (c.closed.valid ? "true" : "false") + "," + c.oracle_name + "," +
                 (c.oracle_found ? g12(c.oracle_energy) : "") + "," + (c.oracle_found ? g12(c.oracle_diff) : "") +
                 "," + (c.dirac_found ? g12(c.dirac_energy) : "") + "," +
                 (c.dirac_found ? g12(c.dirac_diff) : "") + "," + (c.pass ? "true" : "false") + "\n";
    }
    out.text = s;
    return out;
}

Output cmd_spinor(const RunConfig& cfg, Format fmt)
{
    const auto r = build_spinor(cfg);
    const auto& sp = r.sp;
    const auto dens = sp.density();
    Output out;
    if (fmt == Format::Records) {
        json j = header(cfg, "spinor");
        j["n"] = cfg.require_n();
        j["branch"] = cfg.branch;
        j["E"] = sp.energy;
        j["norm"] = sp.norm;
        j["tail_flag"] = sp.tail_flag;
        j["source"] = r.source;
        j["info"] = r.info;
        json x = json::array(), a = json::array(), b = json::array();
        for (int i = 0; i < sp.grid.n; ++i) {
            x.push_back(sp.grid.x(i));
            a.push_back({sp.psi_plus[i].real(), sp.psi_plus[i].imag()});
            b.push_back({sp.psi_minus[i].real(), sp.psi_minus[i].imag()});
        }
        j["x"] = x;
        j["psi_plus"] = a;
        j["psi_minus"] = b;
        out.text = j.dump() + "\n";
        return out;
    }
    std::string s = csv_provenance(cfg, "spinor",
                                   "E=" + g12(sp.energy) + " norm=" + g12(sp.norm) + " source=" + r.source + " " +
                                       r.extra + (sp.tail_flag ? " tail_flag=true" : ""));
    s += "x,re_psi_plus,im_psi_plus,re_psi_minus,im_psi_minus,abs2_total\n";
    for (int i = 0; i < sp.grid.n; ++i)
        s += g12(sp.grid.x(i)) + "," + g12(sp.psi_plus[i].real()) + "," + g12(sp.psi_plus[i].imag()) + "," +
             g12(sp.psi_minus[i].real()) + "," + g12(sp.psi_minus[i].imag()) + "," + g12(dens[i]) + "\n";
    out.text = s;
    return out;
}

Output cmd_ptcheck(const RunConfig& cfg, Format fmt)
{
    const auto checks = pt_checks(cfg);
    const bool pass = std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
    return {checks_text(cfg, checks, fmt, "ptcheck", pass), pass ? Ok : VerifyFailed};
}

Output cmd_verify(const RunConfig& cfg, Format fmt)
{
    auto checks = pt_checks(cfg);
    json extra = json::object();
    bool numerical_failure = false;
    switch (cfg.family.tag()) {
    case FamilyTag::Oscillator: oscillator_checks(cfg, checks); break;
    case FamilyTag::Quadratic: quadratic_checks(cfg, checks); break;
    case FamilyTag::RosenMorse: rosen_morse_checks(cfg, checks); break;
    case FamilyTag::GenericSampled: {
        try {
            const auto sp = dirac_spectrum(cfg.family, cfg.grid, dirac_options(cfg, nullptr));
            checks.push_back({"dirac_spectrum", true, double(sp.states.size()), 0.0,
                              std::to_string(sp.states.size()) + " localized real levels"});
        } catch (const NumericalError& e) {
            numerical_failure = true;
            checks.push_back({"dirac_spectrum", false, 0.0, 0.0, e.what()});
        }
        break;
    }
    }
    if (cfg.family.tag() != FamilyTag::GenericSampled) {
        const auto closed = closed_spectrum(cfg);
        const auto ver = compare_oracles(cfg, closed);
        numerical_failure = numerical_failure || ver.dirac_error.has_value();
        for (const auto& c : ver.rows) {
            const std::string tag = "n=" + std::to_string(c.closed.n) + " b=" + (c.closed.branch > 0 ? "+" : "-");
            std::string detail = "closed " + g12(c.closed.energy);
            if (c.oracle_found)
                detail += ", " + c.oracle_name + " " + g12(c.oracle_energy);
            if (c.dirac_found)
                detail += ", dirac " + g12(c.dirac_energy) + " (diff " + g12(c.dirac_diff) + ")";
            if (!c.note.empty())
                detail += "; " + c.note;
            const double val = c.closed.valid ? c.oracle_diff : c.dirac_diff;
            const double lim = c.closed.valid ? cfg.tol : 0.05;
            checks.push_back({"spectrum " + tag, c.pass, val, lim, detail});
        }
        extra["comparisons"] = json::array();
        for (const auto& c : ver.rows)
            extra["comparisons"].push_back(comparison_json(c));
    }
    const bool pass = std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
    Output out{checks_text(cfg, checks, fmt, "verify", pass, extra), pass ? Ok : VerifyFailed};
    if (numerical_failure)
        out.exit_code = NumericalFailure;
    return out;
}

Output cmd_norm(const RunConfig& cfg, Format fmt)
{
    const int n = cfg.require_n();
    std::vector<Check> rows;
    json extra = json::object();
    bool pass = true;
    if (cfg.family.tag() == FamilyTag::Oscillator) {
        const auto nr = oscillator_norm(cfg.family, n, cfg.form);
        extra["N_quadrature"] = nr.quadrature;
        if (nr.closed_form) {
            extra["N_closed_form"] = *nr.closed_form;
            extra["rel_diff"] = nr.rel_diff;
            extra["N_as_typeset"] = oscillator_norm_printed(cfg.family, n);
        }
        const auto sp = oscillator_spinor(cfg.family, n, cfg.branch, cfg.grid, cfg.form,
                                          nr.closed_form.value_or(nr.quadrature));
        const double integral = quadrature_norm(sp);
        extra["integral"] = integral;
        pass = std::abs(integral - 1.0) <= cfg.tol && nr.rel_diff <= 1e-8;
        rows.push_back({"integral", std::abs(integral - 1.0) <= cfg.tol, integral, 1.0,
                        nr.closed_form ? "scaled by the closed-form N" : "scaled by the quadrature N"});
        if (nr.closed_form)
            rows.push_back({"closed_vs_quadrature", nr.rel_diff <= 1e-8, nr.rel_diff, 1e-8,
                            "N=" + g12(*nr.closed_form)});
    } else if (cfg.family.tag() == FamilyTag::RosenMorse) {
        const auto rep = rosen_morse_spinor(cfg.family, n, cfg.branch, cfg.grid);
        rows.push_back({"printed.x_norm", true, rep.printed.norm, 1.0, "printed form scaled on the x-grid"});
        rows.push_back({"printed.z_norm", true, rep.z_norm, 1.0, "same constant, midpoint z-grid"});
        if (rep.oracle)
            rows.push_back({"oracle.x_norm", std::abs(rep.oracle->norm - 1.0) <= cfg.tol, rep.oracle->norm, 1.0,
                            "oracle eigenfunction"});
        extra["summary"] = rep.summary;
        pass = std::all_of(rows.begin(), rows.end(), [](const Check& c) { return c.pass; });
    } else {
        const auto r = oracle_spinor(cfg, n);
        rows.push_back({"oracle.x_norm", std::abs(r.sp.norm - 1.0) <= cfg.tol, r.sp.norm, 1.0, r.extra});
        pass = rows.back().pass;
    }
    return {checks_text(cfg, rows, fmt, "norm", pass, extra), pass ? Ok : VerifyFailed};
}

void write_atomic(const std::string& path, const std::string& text)
{
    const std::string tmp = path + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f)
            throw ConfigError("cannot write '" + tmp + "'");
        f << text;
        f.flush();
        if (!f) {
            std::remove(tmp.c_str());
            throw ConfigError("write to '" + tmp + "' failed");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::remove(tmp.c_str());
        throw ConfigError("cannot rename onto '" + path + "': " + ec.message());
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Spectra and spinors of PT-symmetric Dirac couplings", "ptdirac"};
    app.require_subcommand(1);
    std::string config, out_path, format = "records";
    bool verify = false;
    std::optional<int> grid_n;
    std::optional<double> box, tol;
    app.add_option("--config", config, "flat key = value run configuration")->required();
    app.add_option("--out", out_path, "output file (stdout when absent)");
    app.add_option("--format", format, "csv or records")->check(CLI::IsMember({"csv", "records"}));
    app.add_flag("--verify", verify, "compare closed forms with both oracles");
    app.add_option("--grid-n", grid_n, "grid points")->check(CLI::Range(8, 1000000));
    app.add_option("--box", box, "half width of the box")->check(CLI::PositiveNumber);
    app.add_option("--tol", tol, "closed form vs oracle tolerance")->check(CLI::PositiveNumber);
    const std::pair<const char*, const char*> subs[] = {
        {"spectrum", "closed-form levels, optionally checked against the oracles"},
        {"spinor", "spinor of level n on the grid"},
        {"verify", "every check available for the family; exit 1 on any failure"},
        {"ptcheck", "parity rules of the couplings and of V_eff"},
        {"norm", "normalisation constant, closed form against quadrature"},
    };
    for (const auto& [name, what] : subs)
        app.add_subcommand(name, what)->fallthrough();

    // CLI11 consumes a reversed argument list without argv[0]
    std::vector<std::string> rev(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(rev.begin(), rev.end());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Ok;
    } catch (const CLI::ParseError& e) {
        err << "ptdirac: " << e.what() << "\n";
        return InputError;
    }
    const std::string cmd = app.get_subcommands().front()->get_name();
    const Format fmt = format == "csv" ? Format::Csv : Format::Records;

    try {
        const auto cfg = load_config(config, {grid_n, box, tol});
        Output o;
        if (cmd == "spectrum")
            o = cmd_spectrum(cfg, fmt, verify);
        else if (cmd == "spinor")
            o = cmd_spinor(cfg, fmt);
        else if (cmd == "verify")
            o = cmd_verify(cfg, fmt);
        else if (cmd == "ptcheck")
            o = cmd_ptcheck(cfg, fmt);
        else
            o = cmd_norm(cfg, fmt);
        if (out_path.empty())
            out << o.text;
        else
            write_atomic(out_path, o.text);
        if (o.exit_code == VerifyFailed)
            err << "ptdirac: " << cmd << ": verification failed\n";
        else if (o.exit_code == NumericalFailure)
            err << "ptdirac: " << cmd << ": numerical failure, partial results flagged\n";
        return o.exit_code;
    } catch (const NumericalError& e) {
        err << "ptdirac: numerical failure: " << e.what() << "\n";
        return NumericalFailure;
    } catch (const Error& e) {
        err << "ptdirac: parameter error: " << e.what() << "\n";
        return InputError;
    } catch (const std::exception& e) {
        err << "ptdirac: error: " << e.what() << "\n";
        return InputError;
    }
}

} // namespace ptdirac::cli
