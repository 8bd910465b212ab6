#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <flatcount/flatcount.hpp>

namespace {

using namespace flatcount;

struct CommonOpts {
    std::string surface_file;
    std::string catalog_name;
    bool normalize = false;
    int threads = 0;
    std::uint64_t seed = 0;
    std::string output;
    std::string format = "csv";
    std::vector<double> mat;
    double gt = 0.0;
    double rot = 0.0;
};

void add_source_options(CLI::App* cmd, CommonOpts& o) {
    auto* sf = cmd->add_option("--surface", o.surface_file, "surface JSON file");
    auto* cat = cmd->add_option("--catalog", o.catalog_name,
                                "built-in surface (torus, L-origami, regular-octagon, "
                                "random-origami(n,seed))");
    sf->excludes(cat);
    cat->excludes(sf);
    cmd->add_flag("--normalize", o.normalize, "rescale to unit area");
    cmd->add_option("--threads", o.threads, "worker threads, 0 = auto");
}

void add_output_options(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--output", o.output, "output path (default: stdout)");
    cmd->add_option("--format", o.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--seed", o.seed, "seed recorded in reports");
}

void add_transform_options(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--mat", o.mat,
                    "apply a row-major unimodular matrix a b c d to the surface")
        ->expected(4);
    cmd->add_option("--gt", o.gt, "apply diag(e^t, e^-t) to the surface");
    cmd->add_option("--rot", o.rot, "apply a rotation (radians) to the surface");
}

TranslationSurface load_from(const CommonOpts& o) {
    TranslationSurface s;
    if (!o.surface_file.empty()) {
        s = load_surface(o.surface_file);
        if (o.normalize) s = normalize(s);
    } else if (!o.catalog_name.empty()) {
        s = catalog(o.catalog_name, o.normalize);
    } else {
        throw parse_error("one of --surface or --catalog is required");
    }
    if (!o.mat.empty()) s = act_on_surface(make_raw(o.mat[0], o.mat[1], o.mat[2], o.mat[3]), s);
    if (o.gt != 0.0) s = act_on_surface(make_gt(o.gt), s);
    if (o.rot != 0.0) s = act_on_surface(make_rot(o.rot), s);
    return s;
}

void emit(const CommonOpts& o, const std::string& content) {
    if (o.output.empty())
        std::cout << content;
    else
        write_text_file(o.output, content);
}

void emit_rows(const CommonOpts& o, const std::vector<ReportRow>& rows) {
    if (o.format == "json")
        emit(o, rows_to_json(rows).dump(2) + "\n");
    else
        emit(o, rows_to_csv(rows));
}

std::string enumerate_csv(const HolonomyMultiset& m) {
    std::string out = "x,y,length,start_sing,end_sing,collapsed\n";
    for (const SaddleConnection& e : m.entries) {
        out += detail::fmt_double(e.holonomy.x);
        out += ',' + detail::fmt_double(e.holonomy.y);
        out += ',' + detail::fmt_double(e.length);
        out += ',' + std::to_string(e.start_singularity);
        out += ',' + std::to_string(e.end_singularity);
        out += ',' + std::to_string(m.collapsed ? 1 : 0);
        out += '\n';
    }
    return out;
}

std::string enumerate_json(const HolonomyMultiset& m) {
    nlohmann::json j;
    j["bound_L"] = m.bound_L;
    j["source"] = m.source;
    j["collapsed"] = m.collapsed;
    nlohmann::json arr = nlohmann::json::array();
    for (const SaddleConnection& e : m.entries) {
        nlohmann::json o;
        o["x"] = e.holonomy.x;
        o["y"] = e.holonomy.y;
        o["length"] = e.length;
        o["start_sing"] = e.start_singularity;
        o["end_sing"] = e.end_singularity;
        arr.push_back(o);
    }
    j["connections"] = arr;
    return j.dump(2) + "\n";
}

int run_validate(const CommonOpts& o) {
    const TranslationSurface s = load_from(o);
    require_valid(s);
    const SurfaceTopology topo = build_topology(s);
    std::cout << "name: " << s.name << "\n"
              << "mode: " << to_string(s.mode) << "\n"
              << "faces: " << s.face_count() << "\n"
              << "edges: " << s.edge_count() << "\n"
              << "area: " << detail::fmt_double(total_area(s)) << "\n"
              << "genus: " << topo.genus << "\n"
              << "stratum: " << stratum_label(topo) << "\n";
    for (std::size_t v = 0; v < topo.cone_angle.size(); ++v)
        std::cout << "singularity " << v << ": cone angle "
                  << detail::fmt_double(topo.cone_angle[v]) << " (order "
                  << topo.order[v] << ")\n";
    return 0;
}

int run_enumerate(const CommonOpts& o, double length, const std::string& oracle,
                  bool collapse) {
    const TranslationSurface s = load_from(o);
    HolonomyMultiset m;
    if (oracle == "origami") {
        m = enumerate_origami(s, length);
    } else if (oracle.empty()) {
        EnumerateOptions opt;
        opt.threads = o.threads;
        m = enumerate(s, length, opt);
    } else {
        throw parse_error("unknown oracle '" + oracle + "'");
    }
    if (collapse) m = collapse_to_set(m);
    emit(o, o.format == "json" ? enumerate_json(m) : enumerate_csv(m));
    return 0;
}

int run_count(const CommonOpts& o, double A, double R) {
    const TranslationSurface s = load_from(o);
    EnumerateOptions opt;
    opt.threads = o.threads;
    const HolonomyMultiset set = enumerate(s, R, opt);
    ReportRow row;
    row.R = R;
    row.N = count_N(set, R);
    row.N_A = count_pairs_NA(set, A, R, o.threads);
    row.N_star = count_pairs_Nstar(set, A, R, o.threads);
    emit_rows(o, {row});
    return 0;
}

int run_circle_average(const CommonOpts& o, double A, double t, int theta_samples) {
    const TranslationSurface s = load_from(o);
    EnumerateOptions opt;
    opt.threads = o.threads;
    const double L = std::sqrt(2.0) * std::exp(t) * (1.0 + 1e-12);
    const HolonomyMultiset set = enumerate(s, L, opt);
    const CircleAverage ca = circle_average_sv(set, A, t, theta_samples, o.threads);
    emit_rows(o, {row_from(ca)});
    return 0;
}

int run_decompose(const CommonOpts& o, double A, double t, int theta_samples) {
    const TranslationSurface s = load_from(o);
    const DecompositionCheck chk =
        run_decomposition_check(s, A, t, theta_samples, o.threads);
    emit_rows(o, {row_from(chk.terms)});
    std::cerr << "decomposition: " << (chk.pass ? "PASS" : "FAIL")
              << " residual=" << detail::fmt_double(chk.terms.residual)
              << " tolerance=" << detail::fmt_double(chk.tolerance)
              << " coverage_violations=" << chk.terms.coverage_violations << "\n";
    return chk.pass ? 0 : 1;
}

int run_fit(const CommonOpts& o, double A, double R_max, int grid_size, int theta_samples) {
    const TranslationSurface s = load_from(o);
    CountingReport rep = run_convergence(s, A, R_max, grid_size, theta_samples, o.threads);
    rep.seed = o.seed;
    emit(o, export_report(rep, o.format));
    std::cerr << "fit: c_direct=" << detail::fmt_double(rep.c_direct)
              << " kappa_hat=" << detail::fmt_double(rep.kappa_hat)
              << " c_siegel=" << detail::fmt_double(rep.c_siegel)
              << (rep.pre_asymptotic ? " (pre-asymptotic)" : "") << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"saddle connection counting on translation surfaces"};
    app.require_subcommand(1);

    CommonOpts o;
    double A = 1.0, R = 0.0, t = 0.0, length = 0.0, R_max = 0.0;
    int theta_samples = 4096, grid_size = 13;
    std::string oracle;
    bool collapse = false;

    CLI::App* validate = app.add_subcommand("validate", "check a surface and report its stratum");
    add_source_options(validate, o);
    add_transform_options(validate, o);

    CLI::App* enumerate_cmd = app.add_subcommand("enumerate", "list saddle connections");
    add_source_options(enumerate_cmd, o);
    add_output_options(enumerate_cmd, o);
    add_transform_options(enumerate_cmd, o);
    enumerate_cmd->add_option("--length", length, "length bound")->required();
    enumerate_cmd->add_option("--oracle", oracle, "alternative enumerator (origami)");
    enumerate_cmd->add_flag("--collapse", collapse, "collapse repeated holonomy vectors");

    CLI::App* count = app.add_subcommand("count", "counting functions at one radius");
    add_source_options(count, o);
    add_output_options(count, o);
    add_transform_options(count, o);
    count->add_option("-A,--virtual-area", A, "virtual area bound");
    count->add_option("-R,--radius", R, "counting radius")->required();

    CLI::App* cavg = app.add_subcommand("circle-average", "circle average of the trapezoid transform");
    add_source_options(cavg, o);
    add_output_options(cavg, o);
    add_transform_options(cavg, o);
    cavg->add_option("-A,--virtual-area", A, "virtual area bound");
    cavg->add_option("-t,--time", t, "geodesic flow time")->required();
    cavg->add_option("--theta-samples", theta_samples, "quadrature samples (power of two)");

    CLI::App* decompose = app.add_subcommand("decompose", "shell-count decomposition check");
    add_source_options(decompose, o);
    add_output_options(decompose, o);
    add_transform_options(decompose, o);
    decompose->add_option("-A,--virtual-area", A, "virtual area bound");
    decompose->add_option("-t,--time", t, "geodesic flow time")->required();
    decompose->add_option("--theta-samples", theta_samples, "quadrature samples (power of two)");

    CLI::App* fit = app.add_subcommand("fit", "convergence study and growth fit");
    add_source_options(fit, o);
    add_output_options(fit, o);
    add_transform_options(fit, o);
    fit->add_option("-A,--virtual-area", A, "virtual area bound");
    fit->add_option("-R,--radius", R_max, "largest radius of the grid")->required();
    fit->add_option("--grid-size", grid_size, "number of grid radii");
    fit->add_option("--theta-samples", theta_samples, "quadrature samples (power of two)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (validate->parsed()) return run_validate(o);
        if (enumerate_cmd->parsed()) return run_enumerate(o, length, oracle, collapse);
        if (count->parsed()) return run_count(o, A, R);
        if (cavg->parsed()) return run_circle_average(o, A, t, theta_samples);
        if (decompose->parsed()) return run_decompose(o, A, t, theta_samples);
        if (fit->parsed()) return run_fit(o, A, R_max, grid_size, theta_samples);
        std::cerr << "error: no subcommand\n";
        return 2;
    } catch (const budget_error& e) {
        std::cerr << "budget error: " << e.what() << "\n";
        return 3;
    } catch (const certificate_error& e) {
        std::cerr << "certificate error: " << e.what() << "\n";
        return 3;
    } catch (const parse_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
