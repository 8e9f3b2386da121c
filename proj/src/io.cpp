#include "slogit/io.hpp"

#include <json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

namespace slogit {

namespace {

using nlohmann::json;

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& token, std::size_t line_no, const char* what) {
    const std::string t = trim(token);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size())
        throw ParseError("line " + std::to_string(line_no) + ": cannot parse " + what +
                         " value '" + t + "'");
    return value;
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

Dataset read_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open dataset file " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("line 1: empty dataset file");
    const std::vector<std::string> header = split_csv_line(line);
    if (header.empty() || trim(header[0]) != "y")
        throw ParseError("line 1: first column must be named 'y'");
    bool has_f0 = !header.empty() && trim(header.back()) == "f0";
    const std::size_t p = header.size() - 1 - (has_f0 ? 1 : 0);
    if (p < 1) throw ParseError("line 1: no predictor columns");
    for (std::size_t j = 1; j <= p; ++j) {
        const std::string expected = "x" + std::to_string(j);
        if (trim(header[j]) != expected)
            throw ParseError("line 1: expected column '" + expected + "', found '" +
                             trim(header[j]) + "'");
    }

    std::vector<double> ys, f0s;
    std::vector<Vector> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string> tok = split_csv_line(line);
        if (tok.size() != header.size())
            throw ParseError("line " + std::to_string(line_no) + ": row has " +
                             std::to_string(tok.size()) + " fields, expected " +
                             std::to_string(header.size()));
        const double y = parse_double(tok[0], line_no, "y");
        if (y != 0.0 && y != 1.0)
            throw ParseError("line " + std::to_string(line_no) + ": y value '" +
                             trim(tok[0]) + "' is not 0 or 1");
        ys.push_back(y);
        Vector row(p);
        for (std::size_t j = 0; j < p; ++j)
            row[j] = parse_double(tok[j + 1], line_no, "x");
        rows.push_back(std::move(row));
        if (has_f0) f0s.push_back(parse_double(tok[p + 1], line_no, "f0"));
    }
    if (rows.empty()) throw ParseError("dataset has no data rows");

    Dataset data;
    data.X = Matrix(rows.size(), p);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < p; ++j) data.X(i, j) = rows[i][j];
    data.y = std::move(ys);
    if (has_f0) data.f0 = std::move(f0s);
    data.validate();
    return data;
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
    std::ostringstream out;
    out << "y";
    for (std::size_t j = 1; j <= data.p(); ++j) out << ",x" << j;
    if (data.has_f0()) out << ",f0";
    out << "\n";
    for (std::size_t i = 0; i < data.n(); ++i) {
        out << format_double(data.y[i]);
        for (std::size_t j = 0; j < data.p(); ++j)
            out << ',' << format_double(data.X(i, j));
        if (data.has_f0()) out << ',' << format_double((*data.f0)[i]);
        out << "\n";
    }
    atomic_write(path, out.str());
}

GroupStructure read_groups_json(const std::string& path, std::size_t p) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open groups file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("groups file " + path + ": " + e.what());
    }
    if (!j.is_array()) throw ParseError("groups file: top level must be an array");
    std::vector<std::vector<int>> groups;
    for (const auto& g : j) {
        if (!g.is_array()) throw ParseError("groups file: each group must be an array");
        std::vector<int> idx;
        for (const auto& v : g) {
            if (!v.is_number_integer())
                throw ParseError("groups file: indices must be integers");
            const int one_based = v.get<int>();
            if (one_based < 1 || static_cast<std::size_t>(one_based) > p)
                throw ParseError("groups file: index " + std::to_string(one_based) +
                                 " out of range 1.." + std::to_string(p));
            idx.push_back(one_based - 1);
        }
        groups.push_back(std::move(idx));
    }
    try {
        return GroupStructure(std::move(groups), p);
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("groups file: ") + e.what());
    }
}

Vector read_weights_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open weights file " + path);
    Vector values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t == "unit,weight") continue;
        const auto tok = split_csv_line(t);
        if (tok.size() != 2)
            throw ParseError("line " + std::to_string(line_no) +
                             ": expected 'unit,weight'");
        values.push_back(parse_double(tok[1], line_no, "weight"));
    }
    if (values.empty()) throw ParseError("weights file has no rows");
    return values;
}

std::string weights_to_csv(const PenaltyWeights& weights, std::uint64_t seed) {
    std::ostringstream out;
    out << "# seed=" << seed << "\n";
    out << "unit,weight\n";
    for (std::size_t u = 0; u < weights.values.size(); ++u)
        out << (u + 1) << ',' << format_double(weights.values[u]) << "\n";
    return out.str();
}

Vector read_values_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file " + path);
    Vector values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t == "value" || t == "variance") continue;
        values.push_back(parse_double(t, line_no, "value"));
    }
    if (values.empty()) throw ParseError("value file has no rows");
    return values;
}

std::string fit_result_to_json(const FitResult& fit, WeightMode mode,
                               std::uint64_t seed) {
    json j;
    j["seed"] = seed;
    j["mode"] = mode == WeightMode::group ? "group" : "lasso";
    j["r"] = fit.r;
    j["converged"] = fit.converged;
    j["iterations"] = fit.iterations;
    j["objective"] = fit.objective;
    j["kkt_residual"] = fit.kkt_residual;
    j["intercept"] = fit.intercept;
    j["beta"] = fit.beta;
    json active = json::array();
    for (int a : fit.active) active.push_back(a + 1); // 1-based in files
    j["active"] = active;
    return j.dump(2) + "\n";
}

std::string path_to_csv(const std::vector<FitResult>& path, std::uint64_t seed) {
    std::ostringstream out;
    out << "# seed=" << seed << "\n";
    const std::size_t p = path.empty() ? 0 : path.front().beta.size();
    out << "r_index,r,converged,iterations,objective,kkt_residual,active_count";
    for (std::size_t j = 1; j <= p; ++j) out << ",beta_" << j;
    out << "\n";
    for (std::size_t i = 0; i < path.size(); ++i) {
        const FitResult& f = path[i];
        out << i << ',' << format_double(f.r) << ',' << (f.converged ? 1 : 0) << ','
            << f.iterations << ',' << format_double(f.objective) << ','
            << format_double(f.kkt_residual) << ',' << f.active.size();
        for (double b : f.beta) out << ',' << format_double(b);
        out << "\n";
    }
    return out.str();
}

std::string monte_carlo_rows_csv(const MonteCarloReport& report, std::uint64_t seed) {
    std::ostringstream out;
    out << "# seed=" << seed << "\n";
    out << "method,r_index,r,replicate,converged,event,estimation_error,"
           "prediction_error,true_selection,false_rate,excess_risk,slow_bound,"
           "violation\n";
    for (const MonteCarloRow& row : report.rows) {
        out << row.method << ',' << row.r_index << ',' << format_double(row.r) << ','
            << row.replicate << ',' << (row.converged ? 1 : 0) << ','
            << (row.event ? 1 : 0) << ',' << format_double(row.metrics.estimation_error)
            << ',' << format_double(row.metrics.prediction_error) << ','
            << (row.metrics.true_selection ? 1 : 0) << ','
            << format_double(row.metrics.false_rate) << ','
            << format_double(row.excess_risk) << ',' << format_double(row.slow_bound)
            << ',' << (row.violation ? 1 : 0) << "\n";
    }
    return out.str();
}

std::string monte_carlo_aggregates_csv(const MonteCarloReport& report,
                                       std::uint64_t seed) {
    std::ostringstream out;
    out << "# seed=" << seed << "\n";
    out << "method,r_index,r_mean,replicates,converged_rate,event_rate,"
           "estimation_error_mean,prediction_error_mean,true_selection_rate,"
           "false_rate_mean,excess_risk_mean,slow_bound_mean,violation_count\n";
    for (const MonteCarloAggregate& a : report.aggregates) {
        out << a.method << ',' << a.r_index << ',' << format_double(a.r_mean) << ','
            << a.replicates << ',' << format_double(a.converged_rate) << ','
            << format_double(a.event_rate) << ','
            << format_double(a.estimation_error_mean) << ','
            << format_double(a.prediction_error_mean) << ','
            << format_double(a.true_selection_rate) << ','
            << format_double(a.false_rate_mean) << ','
            << format_double(a.excess_risk_mean) << ','
            << format_double(a.slow_bound_mean) << ',' << a.violation_count << "\n";
    }
    return out.str();
}

std::string bound_report_to_json(const BoundReport& report) {
    json j;
    for (const auto& [k, v] : report.values) j[k] = v;
    for (const auto& [k, v] : report.flags) j[k] = v;
    return j.dump(2) + "\n";
}

} // namespace slogit
