#include "tunefree/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace tunefree::io {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_lines(const std::string &text) {
    std::vector<std::string> lines;
    std::string line;
    std::istringstream is(text);
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

/// Splits one CSV line; double quotes group text and "" escapes a quote.
std::vector<std::string> split_fields(const std::string &line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

bool parse_number(const std::string &cell, double &value) {
    const std::string t = trim(cell);
    if (t.empty())
        return false;
    const char *first = t.data();
    const char *last = t.data() + t.size();
    if (*first == '+')
        ++first;
    const auto res = std::from_chars(first, last, value);
    return res.ec == std::errc() && res.ptr == last;
}

std::string csv_escape(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + '"';
}

std::string cell_text(const Json &v) {
    if (v.is_null())
        return "";
    if (v.is_string())
        return v.get<std::string>();
    return v.dump();
}

Json to_json(const Vector &v) {
    Json arr = Json::array();
    for (Index i = 0; i < v.size(); ++i)
        arr.push_back(std::isfinite(v[i]) ? Json(v[i]) : Json());
    return arr;
}

Json to_json(const Matrix &M) {
    Json rows = Json::array();
    for (Index i = 0; i < M.rows(); ++i)
        rows.push_back(to_json(Vector(M.row(i).transpose())));
    return rows;
}

Json optional_json(const std::optional<double> &v) {
    return v ? Json(*v) : Json();
}

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(); }

} // namespace

CsvTable parse_csv(const std::string &text) {
    CsvTable table;
    std::vector<std::vector<double>> rows;
    std::size_t width = 0;
    bool first = true;
    const auto lines = split_lines(text);
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        if (trim(lines[ln]).empty())
            continue;
        const auto fields = split_fields(lines[ln]);
        std::vector<double> row(fields.size());
        std::size_t bad = fields.size();
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (!parse_number(fields[c], row[c])) {
                bad = c;
                break;
            }
        }
        if (first) {
            first = false;
            width = fields.size();
            if (bad < fields.size()) {
                for (const auto &f : fields)
                    table.header.push_back(trim(f));
                continue;
            }
        }
        if (fields.size() != width)
            throw InputError("line " + std::to_string(ln + 1) + ": expected " +
                             std::to_string(width) + " fields, found " +
                             std::to_string(fields.size()));
        if (bad < fields.size())
            throw InputError("line " + std::to_string(ln + 1) + ", column " +
                             std::to_string(bad + 1) + ": '" +
                             trim(fields[bad]) + "' is not a number");
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw InputError("CSV contains no numeric rows");
    table.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(width));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < width; ++j)
            table.values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    return table;
}

std::string read_text(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write '" + path + "'");
    out << text;
}

CsvTable read_csv(const std::string &path) {
    try {
        return parse_csv(read_text(path));
    } catch (const InputError &e) {
        throw InputError(path + ": " + e.what());
    }
}

Matrix read_matrix(const std::string &path) { return read_csv(path).values; }

Vector read_vector(const std::string &path) {
    const Matrix M = read_matrix(path);
    if (M.cols() == 1)
        return M.col(0);
    if (M.rows() == 1)
        return M.row(0).transpose();
    throw InputError(path + ": expected a single column, found " +
                     std::to_string(M.cols()));
}

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

void write_matrix(std::ostream &os, const Matrix &M) {
    for (Index i = 0; i < M.rows(); ++i) {
        for (Index j = 0; j < M.cols(); ++j) {
            if (j)
                os << ',';
            os << format_double(M(i, j));
        }
        os << '\n';
    }
}

void write_vector(std::ostream &os, const Vector &v) {
    for (Index i = 0; i < v.size(); ++i)
        os << format_double(v[i]) << '\n';
}

std::vector<sim::Scenario> parse_scenarios(const std::string &text) {
    std::vector<sim::Scenario> out;
    sim::Scenario cur;
    bool open = false;
    bool seen_key = false;
    auto finish = [&](std::size_t line) {
        if (!seen_key)
            return;
        try {
            cur.validate();
        } catch (const InputError &e) {
            throw InputError("scenario ending at line " + std::to_string(line) +
                             ": " + e.what());
        }
        if (cur.label.empty())
            cur.label = "scenario" + std::to_string(out.size() + 1);
        out.push_back(cur);
        cur = sim::Scenario{};
        seen_key = false;
    };

    const auto lines = split_lines(text);
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        std::string line = lines[ln];
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const std::string where = "line " + std::to_string(ln + 1) + ": ";
        if (line.front() == '[') {
            if (line != "[scenario]")
                throw InputError(where + "unknown section '" + line + "'");
            if (open || seen_key)
                finish(ln);
            open = true;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InputError(where + "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        seen_key = true;

        auto as_number = [&](double &x) {
            if (!parse_number(value, x))
                throw InputError(where + key + " must be numeric, got '" + value + "'");
        };
        auto as_count = [&](auto &field) {
            double x = 0;
            as_number(x);
            if (x != std::floor(x) || x < 0)
                throw InputError(where + key + " must be a nonnegative integer");
            field = static_cast<std::remove_reference_t<decltype(field)>>(x);
        };

        if (key == "label") {
            cur.label = value;
        } else if (key == "n") {
            as_count(cur.n);
        } else if (key == "p") {
            as_count(cur.p);
        } else if (key == "sigma") {
            as_number(cur.sigma);
        } else if (key == "replications") {
            as_count(cur.replications);
        } else if (key == "seed") {
            std::uint64_t s = 0;
            const auto res = std::from_chars(value.data(), value.data() + value.size(), s);
            if (res.ec != std::errc() || res.ptr != value.data() + value.size())
                throw InputError(where + "seed must be an unsigned integer");
            cur.base_seed = s;
        } else if (key == "beta0") {
            cur.beta0.clear();
            std::istringstream items(value);
            std::string item;
            while (std::getline(items, item, ',')) {
                item = trim(item);
                if (item.empty())
                    continue;
                const auto colon = item.find(':');
                double idx = 0, val = 0;
                if (colon == std::string::npos ||
                    !parse_number(item.substr(0, colon), idx) ||
                    !parse_number(item.substr(colon + 1), val) ||
                    idx != std::floor(idx))
                    throw InputError(where + "beta0 entries must look like index:value");
                cur.beta0.emplace_back(static_cast<Index>(idx), val);
            }
        } else {
            throw InputError(where + "unknown key '" + key + "'");
        }
    }
    finish(lines.size());
    if (out.empty())
        throw InputError("scenario file defines no scenario");
    return out;
}

Format parse_format(const std::string &name) {
    if (name == "json-lines" || name == "jsonl" || name == "json")
        return Format::JsonLines;
    if (name == "csv")
        return Format::Csv;
    if (name == "pretty-table" || name == "pretty" || name == "table")
        return Format::Pretty;
    throw InputError("unknown report format '" + name + "'");
}

Json regression_record(const estimators::RegressionFit &fit, const Json &inputs) {
    Json j;
    j["record"] = "regression";
    for (auto it = inputs.begin(); it != inputs.end(); ++it)
        j[it.key()] = it.value();
    j["sigma_hat"] = number(fit.sigma_hat);
    j["gamma"] = fit.gamma;
    j["m1"] = fit.m1;
    j["m2"] = fit.m2;
    j["rank_k"] = fit.rank_k;
    j["residual_sq"] = fit.residual_sq;
    j["budget"] = fit.budget;
    j["support_threshold"] = fit.support_threshold;
    j["support"] = fit.support;
    j["beta_hat"] = to_json(fit.beta_hat);
    j["path_steps_m1"] = fit.path_steps_m1;
    j["path_steps_m2"] = fit.path_steps_m2;
    j["seed"] = fit.seed;
    j["stream"] = fit.stream;
    j["warnings"] = fit.warnings;
    return j;
}

Json matrix_record(const estimators::MatrixFit &fit, const Json &inputs) {
    Json j;
    j["record"] = "denoise";
    for (auto it = inputs.begin(); it != inputs.end(); ++it)
        j[it.key()] = it.value();
    j["rows"] = fit.m_hat.rows();
    j["cols"] = fit.m_hat.cols();
    j["sigma_hat"] = number(fit.sigma_hat);
    j["theta"] = fit.theta;
    j["budget"] = fit.budget;
    j["nuclear_y"] = fit.nuclear_y;
    j["nuclear_z"] = fit.nuclear_z;
    j["singular_values"] = to_json(fit.singular_values);
    Vector shrunk = (fit.singular_values.array() - fit.theta).max(0.0).matrix();
    if (fit.budget == 0.0)
        shrunk = fit.singular_values;
    else if (fit.singular_values.squaredNorm() <= fit.budget)
        shrunk.setZero();
    j["shrunk_singular_values"] = to_json(shrunk);
    j["m_hat"] = to_json(fit.m_hat);
    j["seed"] = fit.seed;
    j["stream"] = fit.stream;
    return j;
}

std::vector<Json> sim_records(const sim::SimReport &report) {
    const auto &sc = report.scenario;
    auto scenario_fields = [&](Json &j) {
        j["scenario"] = sc.label;
        j["n"] = sc.n;
        j["p"] = sc.p;
        j["sigma"] = sc.sigma;
        j["mean"] = sc.formula();
    };
    std::vector<Json> out;
    for (const auto &r : report.records) {
        Json j;
        j["record"] = "replication";
        scenario_fields(j);
        j["method"] = sim::method_name(r.method);
        j["replication"] = r.replication;
        j["design_seed"] = r.design_seed;
        j["noise_seed"] = r.noise_seed;
        j["method_seed"] = r.method_seed;
        j["ok"] = r.ok;
        j["error"] = r.error;
        j["true_positives"] = r.true_positives;
        j["false_positives"] = r.false_positives;
        j["prediction_error"] = number(r.prediction_error);
        j["normalized_prediction_error"] = optional_json(r.normalized_prediction_error);
        if (r.method == sim::Method::Proposed) {
            j["sigma_hat"] = number(r.sigma_hat);
            j["m1"] = r.m1;
            j["m2"] = r.m2;
            j["gamma"] = r.gamma;
            j["rank_k"] = r.rank_k;
            j["residual_sq"] = r.residual_sq;
            j["budget"] = r.budget;
        } else {
            j["lambda"] = r.lambda;
        }
        j["seconds"] = r.seconds;
        out.push_back(std::move(j));
    }
    for (const auto *s : {&report.proposed, &report.cv_lasso}) {
        if (s->successes + s->failures == 0)
            continue;
        Json j;
        j["record"] = "aggregate";
        scenario_fields(j);
        j["method"] = sim::method_name(s->method);
        j["replications"] = sc.replications;
        j["base_seed"] = sc.base_seed;
        j["successes"] = s->successes;
        j["failures"] = s->failures;
        j["avg_true_positives"] = s->avg_true_positives;
        j["avg_false_positives"] = s->avg_false_positives;
        j["avg_prediction_error"] = s->avg_prediction_error;
        j["avg_normalized_prediction_error"] =
            optional_json(s->avg_normalized_prediction_error);
        j["seconds"] = s->elapsed_seconds;
        out.push_back(std::move(j));
    }
    return out;
}

std::vector<Json> matrix_sim_records(const sim::MatrixSimReport &report) {
    const auto &sc = report.scenario;
    auto scenario_fields = [&](Json &j) {
        j["l"] = sc.l;
        j["m"] = sc.m;
        j["rank"] = sc.rank;
        j["sigma"] = sc.sigma;
        j["nuclear_norm"] = report.nuclear_norm;
    };
    std::vector<Json> out;
    for (const auto &r : report.records) {
        Json j;
        j["record"] = "matrix_replication";
        scenario_fields(j);
        j["replication"] = r.replication;
        j["signal_seed"] = r.signal_seed;
        j["noise_seed"] = r.noise_seed;
        j["estimator_seed"] = r.estimator_seed;
        j["risk"] = r.risk;
        j["normalized_risk"] = optional_json(r.normalized_risk);
        j["sigma_hat"] = r.sigma_hat;
        j["sigma_rel_err_sq"] = optional_json(r.sigma_rel_err_sq);
        j["theta"] = r.theta;
        j["residual_sq"] = r.residual_sq;
        j["budget"] = r.budget;
        j["feasible"] = r.feasible;
        out.push_back(std::move(j));
    }
    Json j;
    j["record"] = "matrix_aggregate";
    scenario_fields(j);
    j["replications"] = sc.replications;
    j["seed"] = sc.seed;
    j["avg_risk"] = report.avg_risk;
    j["avg_normalized_risk"] = optional_json(report.avg_normalized_risk);
    j["avg_sigma_rel_err_sq"] = optional_json(report.avg_sigma_rel_err_sq);
    if (report.bounds) {
        j["s"] = report.bounds->s;
        j["bound_c1"] = report.bounds->bound_value;
        j["sigma_bound_c1"] = report.bounds->sigma_bound_value;
    }
    j["seconds"] = report.elapsed_seconds;
    out.push_back(std::move(j));
    return out;
}

Json bound_record(const std::string &kind, const estimators::RiskBound &b,
                  const Json &inputs) {
    Json j;
    j["record"] = "bounds";
    j["kind"] = kind;
    for (auto it = inputs.begin(); it != inputs.end(); ++it)
        j[it.key()] = it.value();
    if (kind == "regression") {
        j["r"] = b.r;
        j["term_r"] = b.risk_terms[0];
        j["term_r2"] = b.risk_terms[1];
        j["term_sqrt_log"] = b.risk_terms[2];
        j["term_log"] = b.risk_terms[3];
    } else {
        j["s"] = b.s;
        j["term_s"] = b.risk_terms[0];
        j["term_s2"] = b.risk_terms[1];
        j["term_inv_sqrt_lm"] = b.risk_terms[2];
    }
    j["risk_bound_c1"] = b.bound_value;
    j["sigma_bound_c1"] = b.sigma_bound_value;
    j["a"] = b.a;
    j["m2_bound"] = b.m2_bound;
    j["m4_bound"] = b.m4_bound;
    j["sigma_mse_bound"] = number(b.sigma_mse_bound);
    return j;
}

std::string render(const std::vector<Json> &records, Format format) {
    std::ostringstream os;
    if (format == Format::JsonLines) {
        for (const auto &r : records)
            os << r.dump() << '\n';
        return os.str();
    }

    std::vector<std::string> columns;
    for (const auto &r : records)
        for (auto it = r.begin(); it != r.end(); ++it)
            if (std::find(columns.begin(), columns.end(), it.key()) == columns.end())
                columns.push_back(it.key());

    auto value_of = [](const Json &r, const std::string &key, bool brief) {
        if (!r.contains(key))
            return std::string();
        const Json &v = r.at(key);
        if (brief && v.is_array() && v.size() > 8)
            return "[" + std::to_string(v.size()) + " values]";
        if (brief && v.is_number_float()) {
            std::ostringstream s;
            s << std::setprecision(6) << v.get<double>();
            return s.str();
        }
        return cell_text(v);
    };

    if (format == Format::Csv) {
        for (std::size_t c = 0; c < columns.size(); ++c)
            os << (c ? "," : "") << csv_escape(columns[c]);
        os << '\n';
        for (const auto &r : records) {
            for (std::size_t c = 0; c < columns.size(); ++c)
                os << (c ? "," : "") << csv_escape(value_of(r, columns[c], false));
            os << '\n';
        }
        return os.str();
    }

    std::vector<std::size_t> width(columns.size());
    std::vector<std::vector<std::string>> cells;
    for (std::size_t c = 0; c < columns.size(); ++c)
        width[c] = columns[c].size();
    for (const auto &r : records) {
        std::vector<std::string> row;
        for (std::size_t c = 0; c < columns.size(); ++c) {
            row.push_back(value_of(r, columns[c], true));
            width[c] = std::max(width[c], row.back().size());
        }
        cells.push_back(std::move(row));
    }
    auto rule = [&] {
        for (std::size_t c = 0; c < columns.size(); ++c)
            os << (c ? "-+-" : "") << std::string(width[c], '-');
        os << '\n';
    };
    for (std::size_t c = 0; c < columns.size(); ++c)
        os << (c ? " | " : "") << std::setw(static_cast<int>(width[c])) << columns[c];
    os << '\n';
    rule();
    for (const auto &row : cells) {
        for (std::size_t c = 0; c < columns.size(); ++c)
            os << (c ? " | " : "") << std::setw(static_cast<int>(width[c])) << row[c];
        os << '\n';
    }
    return os.str();
}

std::vector<Json> parse_json_lines(const std::string &text) {
    std::vector<Json> out;
    const auto lines = split_lines(text);
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        if (trim(lines[ln]).empty())
            continue;
        try {
            out.push_back(Json::parse(lines[ln]));
        } catch (const nlohmann::json::exception &e) {
            throw InputError("line " + std::to_string(ln + 1) + ": " + e.what());
        }
    }
    return out;
}

std::vector<std::map<std::string, std::string>>
parse_csv_records(const std::string &text) {
    const auto lines = split_lines(text);
    std::vector<std::map<std::string, std::string>> out;
    std::vector<std::string> header;
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        if (lines[ln].empty())
            continue;
        auto fields = split_fields(lines[ln]);
        if (header.empty()) {
            header = std::move(fields);
            continue;
        }
        if (fields.size() != header.size())
            throw InputError("line " + std::to_string(ln + 1) + ": expected " +
                             std::to_string(header.size()) + " fields");
        std::map<std::string, std::string> row;
        for (std::size_t c = 0; c < header.size(); ++c)
            row[header[c]] = fields[c];
        out.push_back(std::move(row));
    }
    return out;
}

} // namespace tunefree::io
