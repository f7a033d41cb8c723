#include "gaussdiv/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace gaussdiv::io {

using nlohmann::json;

namespace {

const json & require(const json & doc, const char * key)
{
    if (!doc.is_object() || !doc.contains(key))
        throw InvalidArgument(std::string("missing field \"") + key + "\"");
    return doc.at(key);
}

double number(const json & doc, const char * key)
{
    const json & v = require(doc, key);
    if (!v.is_number())
        throw InvalidArgument(std::string("field \"") + key + "\" must be a number");
    return v.get<double>();
}

double number_or(const json & doc, const char * key, double fallback)
{
    return doc.contains(key) ? number(doc, key) : fallback;
}

// Row-major square matrix from a flat array of dim*dim numbers or a nested array of rows.
Eigen::MatrixXd matrix(const json & v, Eigen::Index dim, const char * what)
{
    Eigen::MatrixXd m(dim, dim);
    if (!v.is_array())
        throw InvalidArgument(std::string(what) + " must be an array");
    if (v.size() == static_cast<std::size_t>(dim * dim) && (v.empty() || v.front().is_number())) {
        for (Eigen::Index i = 0; i < dim; ++i)
            for (Eigen::Index j = 0; j < dim; ++j)
                m(i, j) = v.at(static_cast<std::size_t>(i * dim + j)).get<double>();
        return m;
    }
    if (v.size() != static_cast<std::size_t>(dim))
        throw InvalidArgument(std::string(what) + " has the wrong size");
    for (Eigen::Index i = 0; i < dim; ++i) {
        const json & row = v.at(static_cast<std::size_t>(i));
        if (!row.is_array() || row.size() != static_cast<std::size_t>(dim))
            throw InvalidArgument(std::string(what) + " has a malformed row");
        for (Eigen::Index j = 0; j < dim; ++j)
            m(i, j) = row.at(static_cast<std::size_t>(j)).get<double>();
    }
    return m;
}

Eigen::Index modes(const json & doc)
{
    const json & v = require(doc, "n");
    if (!v.is_number_integer() || v.get<long long>() < 1)
        throw InvalidArgument("field \"n\" must be a positive integer");
    return static_cast<Eigen::Index>(v.get<long long>());
}

json matrix_json(const Eigen::MatrixXd & m)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json optional_number(const std::optional<double> & v)
{
    return v ? json(*v) : json(nullptr);
}

} // namespace

GaussianMap<double> parse_channel(const json & doc)
{
    const Eigen::Index n = modes(doc);
    return GaussianMap<double>(matrix(require(doc, "X"), 2 * n, "X"), matrix(require(doc, "Y"), 2 * n, "Y"));
}

ProcessSpec parse_process(const json & doc)
{
    const json & type_field = require(doc, "type");
    if (!type_field.is_string())
        throw InvalidArgument("field \"type\" must be a string");
    const std::string type = type_field.get<std::string>();

    if (type == "tabulated") {
        const Eigen::Index n = modes(doc);
        const json & times = require(doc, "times");
        const json & xs = require(doc, "X");
        const json & ys = require(doc, "Y");
        if (!times.is_array() || !xs.is_array() || !ys.is_array())
            throw InvalidArgument("tabulated process: times, X, Y must be arrays");
        std::vector<double> t;
        std::vector<Eigen::MatrixXd> x;
        std::vector<Eigen::MatrixXd> y;
        for (const json & v : times)
            t.push_back(v.get<double>());
        for (const json & v : xs)
            x.push_back(matrix(v, 2 * n, "X"));
        for (const json & v : ys)
            y.push_back(matrix(v, 2 * n, "Y"));
        return {type, tabulated_process(std::move(t), x, y), std::nullopt};
    }

    RateProfile rates = [&]() {
        if (type == "rates") {
            const json & segs = require(doc, "segments");
            if (!segs.is_array() || segs.empty())
                throw InvalidArgument("rates: \"segments\" must be a non-empty array");
            std::vector<RateSegment> segments;
            for (const json & s : segs)
                segments.push_back({number(s, "t0"), number(s, "t1"), number(s, "eps"), number(s, "mu")});
            return RateProfile::piecewise(std::move(segments));
        }
        if (type == "damping")
            return damping_rates(number(doc, "gamma"), number(doc, "nu_inf"), number(doc, "horizon"));
        if (type == "qbm") {
            QbmParams p;
            p.omega0 = number(doc, "omega0");
            p.omega_c = number(doc, "omega_c");
            p.alpha = number_or(doc, "alpha", p.alpha);
            p.temperature = number_or(doc, "T_bath", 0.0);
            p.horizon = number_or(doc, "horizon", 30.0 / p.omega0);
            return qbm_rates(p);
        }
        throw InvalidArgument("unknown process type \"" + type + "\"");
    }();
    return {type, phase_insensitive_process(rates), rates};
}

json read_json_file(const std::string & path)
{
    std::ifstream in(path);
    if (!in)
        throw InvalidArgument("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error & e) {
        throw InvalidArgument(path + ": " + e.what());
    }
}

std::string format_double(double value)
{
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc())
        throw InvalidArgument("format_double: conversion failed");
    return std::string(buf, end);
}

std::string region_token(Region r)
{
    return std::string(to_string(r));
}

json verdict_json(const PositivityVerdict & verdict)
{
    json out;
    out["class"] = std::string(to_string(verdict.klass));
    out["cp_margin"] = verdict.cp_margin;
    out["p_margin"] = verdict.p_margin;
    out["p_method"] = verdict.falsifier_only ? "falsifier-only" : "scan";
    if (verdict.falsifier_only)
        out["caveat"] = "falsifier-only: no violating state found among sampled pure states; not a proof of positivity";
    if (verdict.witness)
        out["witness"] = matrix_json(*verdict.witness);
    return out;
}

json report_json(const DivisibilityReport & report)
{
    json out;
    out["class"] = std::string(to_string(report.klass));
    json crossings = json::array();
    for (const Crossing & c : report.crossings)
        crossings.push_back({{"t", c.t}, {"from", region_token(c.from)}, {"to", region_token(c.to)}});
    out["crossings"] = std::move(crossings);
    json samples = json::array();
    for (const RateSample & s : report.samples)
        samples.push_back({{"t", s.rates.t},
                           {"eps", s.rates.eps},
                           {"mu", s.rates.mu},
                           {"delta", s.rates.delta},
                           {"kappa", s.rates.kappa},
                           {"region", region_token(s.region)}});
    out["samples"] = std::move(samples);
    return out;
}

json physicality_json(const PhysicalityReport & report)
{
    json out;
    out["physical"] = report.physical;
    out["violation_time"] = optional_number(report.violation_time);
    out["grid_violation_time"] = optional_number(report.grid_violation_time);
    json table = json::array();
    for (const PhysicalityPoint & p : report.table)
        table.push_back({{"t", p.t},
                         {"lambda_plus", p.lambda_plus},
                         {"lambda_minus", p.lambda_minus},
                         {"integral_plus", p.integral_plus},
                         {"integral_minus", p.integral_minus}});
    out["table"] = std::move(table);
    return out;
}

json windows_json(const std::vector<AmplificationWindow> & windows)
{
    json list = json::array();
    for (const AmplificationWindow & w : windows)
        list.push_back({{"t_start", w.t_start}, {"t_end", w.t_end}, {"max_gap", w.max_gap}});
    return json{{"windows", std::move(list)}};
}

std::string trajectory_csv(const std::vector<RateSample> & samples)
{
    std::string out = "t,eps,mu,delta,kappa,region\n";
    for (const RateSample & s : samples) {
        out += format_double(s.rates.t) + ',' + format_double(s.rates.eps) + ',' + format_double(s.rates.mu) + ','
            + format_double(s.rates.delta) + ',' + format_double(s.rates.kappa) + ',' + region_token(s.region) + '\n';
    }
    return out;
}

std::string physicality_csv(const PhysicalityReport & report)
{
    std::string out = "t,lambda_plus,lambda_minus,integral_plus,integral_minus\n";
    for (const PhysicalityPoint & p : report.table) {
        out += format_double(p.t) + ',' + format_double(p.lambda_plus) + ',' + format_double(p.lambda_minus) + ','
            + format_double(p.integral_plus) + ',' + format_double(p.integral_minus) + '\n';
    }
    return out;
}

std::string windows_csv(const std::vector<AmplificationWindow> & windows)
{
    std::string out = "t_start,t_end,max_gap\n";
    for (const AmplificationWindow & w : windows)
        out += format_double(w.t_start) + ',' + format_double(w.t_end) + ',' + format_double(w.max_gap) + '\n';
    return out;
}

void write_atomically(const std::string & path, const std::string & content)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw InvalidArgument("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out)
            throw InvalidArgument("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw InvalidArgument("cannot rename into " + path + ": " + ec.message());
    }
}

} // namespace gaussdiv::io
