#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "counting.hpp"
#include "errors.hpp"
#include "experiments.hpp"
#include "surface_io.hpp"

namespace flatcount {

// One output row.  Count runs fill R/N/N_A/N_star; quadrature runs fill
// At_hA/m_t..e4/residual/refine_err; unused cells stay zero.
struct ReportRow {
    double R = 0;
    long N = 0;
    long N_A = 0;
    long N_star = 0;
    double At_hA = 0;
    double m_t = 0, e1 = 0, e2 = 0, e3 = 0, e4 = 0;
    double residual = 0;
    double refine_err = 0;
};

inline constexpr const char* report_csv_header =
    "R,N,N_A,N_star,At_hA,m_t,e1,e2,e3,e4,residual,refine_err";

inline std::vector<ReportRow> rows_from(const CountingReport& rep) {
    std::vector<ReportRow> rows;
    rows.reserve(rep.radii.size());
    for (std::size_t j = 0; j < rep.radii.size(); ++j) {
        ReportRow r;
        r.R = rep.radii[j];
        if (j < rep.counts_N.size()) r.N = rep.counts_N[j];
        if (j < rep.counts_NA.size()) r.N_A = rep.counts_NA[j];
        if (j < rep.counts_Nstar.size()) r.N_star = rep.counts_Nstar[j];
        rows.push_back(r);
    }
    return rows;
}

inline ReportRow row_from(const DecompositionTerms& terms) {
    ReportRow r;
    r.R = std::exp(terms.t);
    r.N_star = terms.nstar;
    r.At_hA = terms.circle_average.value;
    r.m_t = terms.m_t;
    r.e1 = terms.e1;
    r.e2 = terms.e2;
    r.e3 = terms.e3;
    r.e4 = terms.e4;
    r.residual = terms.residual;
    r.refine_err = terms.refinement_total;
    return r;
}

inline ReportRow row_from(const CircleAverage& ca) {
    ReportRow r;
    r.R = std::exp(ca.t);
    r.At_hA = ca.value;
    r.refine_err = ca.refinement_error;
    return r;
}

inline std::string rows_to_csv(const std::vector<ReportRow>& rows) {
    std::string out = report_csv_header;
    out += '\n';
    for (const ReportRow& r : rows) {
        out += detail::fmt_double(r.R);
        out += ',' + std::to_string(r.N);
        out += ',' + std::to_string(r.N_A);
        out += ',' + std::to_string(r.N_star);
        out += ',' + detail::fmt_double(r.At_hA);
        out += ',' + detail::fmt_double(r.m_t);
        out += ',' + detail::fmt_double(r.e1);
        out += ',' + detail::fmt_double(r.e2);
        out += ',' + detail::fmt_double(r.e3);
        out += ',' + detail::fmt_double(r.e4);
        out += ',' + detail::fmt_double(r.residual);
        out += ',' + detail::fmt_double(r.refine_err);
        out += '\n';
    }
    return out;
}

inline nlohmann::json rows_to_json(const std::vector<ReportRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const ReportRow& r : rows) {
        nlohmann::json o;
        o["R"] = r.R;
        o["N"] = r.N;
        o["N_A"] = r.N_A;
        o["N_star"] = r.N_star;
        o["At_hA"] = r.At_hA;
        o["m_t"] = r.m_t;
        o["e1"] = r.e1;
        o["e2"] = r.e2;
        o["e3"] = r.e3;
        o["e4"] = r.e4;
        o["residual"] = r.residual;
        o["refine_err"] = r.refine_err;
        arr.push_back(o);
    }
    return arr;
}

inline std::vector<ReportRow> rows_from_json(const nlohmann::json& arr) {
    std::vector<ReportRow> rows;
    for (const auto& o : arr) {
        ReportRow r;
        r.R = o.at("R").get<double>();
        r.N = o.at("N").get<long>();
        r.N_A = o.at("N_A").get<long>();
        r.N_star = o.at("N_star").get<long>();
        r.At_hA = o.at("At_hA").get<double>();
        r.m_t = o.at("m_t").get<double>();
        r.e1 = o.at("e1").get<double>();
        r.e2 = o.at("e2").get<double>();
        r.e3 = o.at("e3").get<double>();
        r.e4 = o.at("e4").get<double>();
        r.residual = o.at("residual").get<double>();
        r.refine_err = o.at("refine_err").get<double>();
        rows.push_back(r);
    }
    return rows;
}

inline nlohmann::json counting_report_to_json(const CountingReport& rep) {
    nlohmann::json j;
    j["surface"] = rep.surface;
    j["mode"] = rep.mode;
    j["area"] = rep.area;
    j["A"] = rep.A;
    j["c_direct"] = rep.c_direct;
    j["kappa_hat"] = rep.kappa_hat;
    j["kappa_se"] = rep.kappa_se;
    j["kappa_estimable"] = rep.kappa_estimable;
    j["kappa_points"] = rep.kappa_points;
    j["c_siegel"] = rep.c_siegel;
    j["c_siegel_refinement"] = rep.c_siegel_refinement;
    j["pre_asymptotic"] = rep.pre_asymptotic;
    j["t_used"] = rep.t_used;
    j["theta_samples"] = rep.theta_samples;
    j["seed"] = rep.seed;
    j["threads"] = rep.threads;
    j["runtime_seconds"] = rep.runtime_seconds;
    j["rows"] = rows_to_json(rows_from(rep));
    return j;
}

inline CountingReport counting_report_from_json(const nlohmann::json& j) {
    CountingReport rep;
    rep.surface = j.at("surface").get<std::string>();
    rep.mode = j.at("mode").get<std::string>();
    rep.area = j.at("area").get<double>();
    rep.A = j.at("A").get<double>();
    rep.c_direct = j.at("c_direct").get<double>();
    rep.kappa_hat = j.at("kappa_hat").get<double>();
    rep.kappa_se = j.at("kappa_se").get<double>();
    rep.kappa_estimable = j.at("kappa_estimable").get<bool>();
    rep.kappa_points = j.at("kappa_points").get<int>();
    rep.c_siegel = j.at("c_siegel").get<double>();
    rep.c_siegel_refinement = j.at("c_siegel_refinement").get<double>();
    rep.pre_asymptotic = j.at("pre_asymptotic").get<bool>();
    rep.t_used = j.at("t_used").get<double>();
    rep.theta_samples = j.at("theta_samples").get<int>();
    rep.seed = j.at("seed").get<std::uint64_t>();
    rep.threads = j.at("threads").get<int>();
    rep.runtime_seconds = j.at("runtime_seconds").get<double>();
    for (const ReportRow& r : rows_from_json(j.at("rows"))) {
        rep.radii.push_back(r.R);
        rep.counts_N.push_back(r.N);
        rep.counts_NA.push_back(r.N_A);
        rep.counts_Nstar.push_back(r.N_star);
    }
    return rep;
}

// Full report in the requested format; CSV carries the row table, JSON carries
// the row table plus the fitted metadata.
inline std::string export_report(const CountingReport& rep, const std::string& format) {
    if (format == "csv") return rows_to_csv(rows_from(rep));
    if (format == "json") return counting_report_to_json(rep).dump(2) + "\n";
    throw parse_error("unknown report format '" + format + "'");
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw parse_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw parse_error("failed while writing '" + path + "'");
}

}  // namespace flatcount
