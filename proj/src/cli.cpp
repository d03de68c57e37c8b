#include "phasefeyn/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "phasefeyn/extrapolation.hpp"
#include "phasefeyn/parallel.hpp"
#include "phasefeyn/propagators.hpp"
#include "phasefeyn/verify.hpp"

namespace phasefeyn::cli {

namespace {

using nlohmann::ordered_json;
constexpr Complex kI(0.0, 1.0);

constexpr int kExitOk = 0;
constexpr int kExitPrecondition = 1;
constexpr int kExitVerification = 2;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

class Output {
  public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_)
                throw PreconditionError("cannot open output path '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

  private:
    std::ofstream file_;
};

void write_table(std::ostream& os, const Table& table, const std::string& format,
                 const std::string& command) {
    if (format == "csv") {
        os << std::setprecision(17);
        for (size_t c = 0; c < table.columns.size(); ++c)
            os << table.columns[c] << (c + 1 < table.columns.size() ? "," : "\n");
        for (const auto& row : table.rows) {
            for (size_t c = 0; c < row.size(); ++c)
                os << row[c] << (c + 1 < row.size() ? "," : "\n");
        }
    } else if (format == "json") {
        ordered_json doc;
        doc["schema"] = 1;
        doc["command"] = command;
        ordered_json rows = ordered_json::array();
        for (const auto& row : table.rows) {
            ordered_json r;
            for (size_t c = 0; c < row.size(); ++c) r[table.columns[c]] = row[c];
            rows.push_back(r);
        }
        doc["rows"] = rows;
        os << doc.dump(2) << "\n";
    } else {
        throw PreconditionError("unknown format '" + format + "' (expected csv or json)");
    }
}

std::vector<double> parse_range(const std::string& spec) {
    double a = 0.0, b = 0.0, step = 0.0;
    char c1 = 0, c2 = 0;
    std::istringstream in(spec);
    if (!(in >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' || !(step > 0.0))
        throw PreconditionError("range must be start:end:step with positive step, got '" + spec +
                                "'");
    std::vector<double> out;
    for (double v = a; v <= b + 1e-12 * std::max(1.0, std::abs(b)); v += step)
        out.push_back(v);
    return out;
}

CcrSchedule parse_schedule(const std::string& spec, double s, double t, double epsilon) {
    if (spec == "default") return default_ccr_schedule(s, t);
    if (spec == "single") return {{epsilon, epsilon / 5.0}};
    CcrSchedule out;
    std::istringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw PreconditionError("schedule entries must be eps:width, got '" + item + "'");
        out.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
    }
    if (out.empty())
        throw PreconditionError("empty ccr schedule");
    return out;
}

ordered_json complex_json(Complex v) { return ordered_json::array({v.real(), v.imag()}); }

int run_propagator(const RunConfig& cfg, Output& out) {
    std::vector<double> ys =
        cfg.y_range.empty() ? std::vector<double>{cfg.y} : parse_range(cfg.y_range);
    Table table;
    table.columns = {"y", "t", "k", "re", "im", "abs", "phase"};
    table.rows.resize(ys.size());
    par::for_index(static_cast<int>(ys.size()), [&](int i) {
        const Complex g = cfg.k > 0.0 ? ho_green(ys[i], cfg.t, cfg.k) : free_green(ys[i], cfg.t);
        table.rows[i] = {ys[i], cfg.t, cfg.k, g.real(), g.imag(), std::abs(g), std::arg(g)};
    });
    write_table(out.stream(), table, cfg.format, "propagator");
    return kExitOk;
}

int run_t_transform(const RunConfig& cfg, Output& out) {
    const TimeGrid grid = build_grid(cfg.t_window, cfg.t_total, cfg.m);
    const PhaseFunction f =
        cfg.f_csv.empty() ? PhaseFunction::zero(grid) : read_csv_file(cfg.f_csv, grid);
    const GaussKernelSpec spec =
        cfg.k > 0.0 ? make_ho_spec(grid, cfg.y, cfg.k) : make_free_spec(grid, cfg.y);
    const TTransformResult res = master_t_transform(spec, f);

    ordered_json doc;
    doc["schema"] = 1;
    doc["command"] = "t-transform";
    doc["t_window"] = grid.t_window;
    doc["t_total"] = grid.t_total;
    doc["m"] = grid.m;
    doc["y"] = cfg.y;
    doc["k"] = cfg.k;
    doc["value_re"] = res.value.real();
    doc["value_im"] = res.value.imag();
    doc["det_factor"] = complex_json(res.det_factor);
    ordered_json gram = ordered_json::array();
    for (int i = 0; i < res.gram.rows(); ++i)
        for (int j = 0; j < res.gram.cols(); ++j) gram.push_back(complex_json(res.gram(i, j)));
    doc["gram"] = gram;
    ordered_json u = ordered_json::array();
    for (int j = 0; j < res.u.size(); ++j) u.push_back(complex_json(res.u[j]));
    doc["u"] = u;
    doc["quad_form"] = complex_json(res.quad_form);
    out.stream() << doc.dump(2) << "\n";
    return kExitOk;
}

int run_spectrum(const RunConfig& cfg, Output& out) {
    const TimeGrid grid = build_grid(cfg.t_window, cfg.t_total, cfg.m);
    const int n_modes = std::min(cfg.n_modes, grid.m / 4);
    const SpectrumResult spec = spectrum_A(grid, cfg.k, n_modes);
    const double t = grid.t_window;
    Table table;
    table.columns = {"n", "eigenvalue", "eigenvalue_analytic", "abs_err", "eigenfunction_max_dev"};
    for (int n = 1; n <= spec.n_modes; ++n) {
        const double ln = cfg.k * std::pow(t / ((n - 0.5) * std::numbers::pi), 2);
        double edev = 0.0;
        for (int j = 0; j < grid.m; ++j) {
            if (!grid.in_window(j)) continue;
            const double analytic = std::sqrt(2.0 / t) *
                                    std::cos(grid.center(j) / t * (n - 0.5) * std::numbers::pi);
            edev = std::max(edev, std::abs(spec.eigenfunctions(j, n - 1) - analytic));
        }
        table.rows.push_back({static_cast<double>(n), spec.eigenvalues[n - 1], ln,
                              std::abs(spec.eigenvalues[n - 1] - ln), edev});
    }
    write_table(out.stream(), table, cfg.format, "spectrum");
    return kExitOk;
}

int run_determinant(const RunConfig& cfg, Output& out) {
    const TimeGrid grid = build_grid(cfg.t_window, cfg.t_total, cfg.m);
    const BlockOperator K = make_K_free(grid);
    const BlockOperator L = make_L_ho(grid, cfg.k);
    const Complex product = fredholm_det(K, L, DetMethod::product, cfg.n_modes);
    const Complex dense = fredholm_det(K, L, DetMethod::dense);
    const Complex analytic = std::cos(std::sqrt(cfg.k) * grid.t_window);

    if (!cfg.dump_matrix.empty()) {
        std::ofstream dump(cfg.dump_matrix);
        if (!dump)
            throw PreconditionError("cannot open dump path '" + cfg.dump_matrix + "'");
        dump << std::setprecision(17) << "block,i,j,re,im\n";
        const BlockOperator N = assemble_N(K, L);
        const std::pair<const char*, const Block*> blocks[] = {
            {"xx", &N.xx}, {"xp", &N.xp}, {"px", &N.px}, {"pp", &N.pp}};
        for (const auto& [name, block] : blocks)
            for (int i = 0; i < grid.m; ++i)
                for (int j = 0; j < grid.m; ++j) {
                    const Complex v = block->entry(i, j);
                    if (v != Complex(0.0))
                        dump << name << ',' << i << ',' << j << ',' << v.real() << ','
                             << v.imag() << '\n';
                }
    }

    const double perr = std::abs(product - analytic) / std::abs(analytic);
    const double derr = std::abs(dense - analytic) / std::abs(analytic);
    ordered_json doc;
    doc["schema"] = 1;
    doc["command"] = "determinant";
    doc["k"] = cfg.k;
    doc["t"] = grid.t_window;
    doc["m"] = grid.m;
    doc["n_modes"] = cfg.n_modes;
    doc["product"] = complex_json(product);
    doc["dense"] = complex_json(dense);
    doc["analytic"] = complex_json(analytic);
    doc["product_rel_err"] = perr;
    doc["dense_rel_err"] = derr;
    doc["pass"] = perr <= 1e-3 && derr <= 1e-3;
    out.stream() << doc.dump(2) << "\n";
    return doc["pass"].get<bool>() ? kExitOk : kExitVerification;
}

ordered_json check_json(const CheckResult& c) {
    ordered_json j;
    j["name"] = c.name;
    j["module"] = c.module;
    j["operation"] = c.operation;
    j["observed"] = c.observed;
    j["expected"] = c.expected;
    j["error"] = c.error;
    j["tolerance"] = c.tolerance;
    j["pass"] = c.pass;
    return j;
}

int run_verify(const RunConfig& cfg, Output& out) {
    std::vector<CheckResult> checks;
    auto append = [&](std::vector<CheckResult> more) {
        for (auto& c : more) checks.push_back(std::move(c));
    };
    const bool all = cfg.suite == "all";
    if (all || cfg.suite == "identities") append(verify_identities(cfg.m, cfg.seed));
    if (all || cfg.suite == "moments") append(verify_moments(cfg.m, cfg.seed));
    if (all || cfg.suite == "ccr") append(verify_ccr(cfg.s, cfg.t, cfg.y, std::max(cfg.m, 2048)));
    if (all || cfg.suite == "growth") append(verify_growth(cfg.m, cfg.seed));
    if (checks.empty())
        throw PreconditionError("unknown suite '" + cfg.suite +
                                "' (identities|moments|ccr|growth|all)");

    int failed = 0;
    ordered_json arr = ordered_json::array();
    for (const auto& c : checks) {
        if (!c.pass) ++failed;
        arr.push_back(check_json(c));
    }
    ordered_json doc;
    doc["schema"] = 1;
    doc["command"] = "verify";
    doc["suite"] = cfg.suite;
    doc["m"] = cfg.m;
    doc["seed"] = cfg.seed;
    doc["checks"] = arr;
    doc["passed"] = static_cast<int>(checks.size()) - failed;
    doc["failed"] = failed;
    out.stream() << doc.dump(2) << "\n";
    return failed == 0 ? kExitOk : kExitVerification;
}

int run_ccr(const RunConfig& cfg, Output& out) {
    const CcrSchedule schedule = parse_schedule(cfg.schedule, cfg.s, cfg.t, cfg.epsilon);
    const CcrLimitResult res = ccr_limit(cfg.s, cfg.t, cfg.y, schedule, std::max(cfg.m, 2048));
    const Complex target = -kI * free_green(cfg.y, cfg.t);
    Table table;
    table.columns = {"epsilon", "width", "diff_re", "diff_im", "abs_err_vs_minus_i_T0"};
    for (const auto& p : res.points)
        table.rows.push_back(
            {p.epsilon, p.width, p.value.real(), p.value.imag(), std::abs(p.value - target)});
    write_table(out.stream(), table, cfg.format, "ccr");
    const double final_err = std::abs(res.points.back().value - target);
    return final_err <= 1e-3 ? kExitOk : kExitVerification;
}

int run_oracle_compare(const RunConfig& cfg, Output& out) {
    std::vector<int> ns = cfg.n_slices;
    if (ns.empty())
        for (int n = 16; n <= 1024; n *= 2) ns.push_back(n);
    const Complex closed =
        cfg.k > 0.0 ? ho_green(cfg.y, cfg.t, cfg.k) : free_green(cfg.y, cfg.t);
    std::vector<Complex> vals(ns.size());
    par::for_index(static_cast<int>(ns.size()),
                   [&](int i) { vals[i] = time_slice_oracle(cfg.y, cfg.t, cfg.k, ns[i]); });
    Table table;
    table.columns = {"n_slices", "re", "im", "abs_err_vs_closed_form"};
    for (size_t i = 0; i < ns.size(); ++i)
        table.rows.push_back({static_cast<double>(ns[i]), vals[i].real(), vals[i].imag(),
                              std::abs(vals[i] - closed)});
    write_table(out.stream(), table, cfg.format, "oracle-compare");
    const Complex extrapolated = vals.size() >= 3 ? richardson_limit(vals, 2.0, 2)
                                                  : vals.back();
    const double err = std::abs(extrapolated - closed) / std::abs(closed);
    return err <= 1e-6 ? kExitOk : kExitVerification;
}

}  // namespace

int run(const RunConfig& config) {
    try {
        Output out(config.output);
        if (config.command == "propagator") return run_propagator(config, out);
        if (config.command == "t-transform") return run_t_transform(config, out);
        if (config.command == "spectrum") return run_spectrum(config, out);
        if (config.command == "determinant") return run_determinant(config, out);
        if (config.command == "verify") return run_verify(config, out);
        if (config.command == "ccr") return run_ccr(config, out);
        if (config.command == "oracle-compare") return run_oracle_compare(config, out);
        std::cerr << "error: unknown command '" << config.command << "'\n";
        return kExitPrecondition;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPrecondition;
    }
}

}  // namespace phasefeyn::cli
