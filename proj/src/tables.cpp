#include "macelast/tables.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string_view>
#include <utility>

namespace macelast {

namespace detail {
const std::vector<std::pair<std::string_view, std::string_view>>& embedded_references();
}

namespace {

std::string trim(std::string s)
{
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        out.push_back(trim(cell));
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

double to_number(const std::string& s, const std::string& what)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) {
        throw SchemaError("not a number in " + what + ": '" + s + "'");
    }
    return v;
}

}  // namespace

ResultTable::ResultTable(std::vector<std::string> header, std::vector<std::vector<std::string>> rows)
    : header_(std::move(header)), rows_(std::move(rows))
{
    for (const auto& r : rows_) {
        if (r.size() != header_.size()) {
            throw SchemaError("row has " + std::to_string(r.size()) + " cells, header has " +
                              std::to_string(header_.size()));
        }
    }
}

ResultTable ResultTable::parse(std::istream& is)
{
    std::string line;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (trim(line).empty() || line[0] == '#') {
            continue;
        }
        if (header.empty()) {
            header = split(line);
        } else {
            rows.push_back(split(line));
        }
    }
    if (header.empty()) {
        throw SchemaError("table has no header line");
    }
    return ResultTable(std::move(header), std::move(rows));
}

ResultTable ResultTable::parse(const std::string& text)
{
    std::istringstream is(text);
    return parse(is);
}

ResultTable ResultTable::load(const std::string& path)
{
    std::ifstream is(path);
    if (!is) {
        throw std::runtime_error("cannot open table '" + path + "'");
    }
    return parse(is);
}

std::size_t ResultTable::column(const std::string& name) const
{
    const auto it = std::find(header_.begin(), header_.end(), name);
    if (it == header_.end()) {
        throw std::out_of_range("table has no column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header_.begin());
}

bool ResultTable::has_column(const std::string& name) const
{
    return std::find(header_.begin(), header_.end(), name) != header_.end();
}

void ResultTable::write(std::ostream& os) const
{
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            os << (i ? "," : "") << cells[i];
        }
        os << '\n';
    };
    line(header_);
    for (const auto& r : rows_) {
        line(r);
    }
}

CompareResult compare(const ResultTable& produced, const ResultTable& reference, const CompareOptions& options)
{
    if (produced.header() != reference.header()) {
        auto join = [](const std::vector<std::string>& h) {
            std::string s;
            for (const auto& c : h) s += (s.empty() ? "" : ",") + c;
            return s;
        };
        throw SchemaError("table schemas differ: produced '" + join(produced.header()) + "' vs reference '" +
                          join(reference.header()) + "'");
    }
    for (const char* col : {"component", "error", "rate"}) {
        if (!reference.has_column(col)) {
            throw SchemaError(std::string("table has no '") + col + "' column");
        }
    }
    std::vector<std::size_t> mesh_cols;
    for (const char* col : {"nx", "ny", "nz"}) {
        if (reference.has_column(col)) {
            mesh_cols.push_back(reference.column(col));
        }
    }
    const std::size_t comp_col = reference.column("component");
    const std::size_t err_col = reference.column("error");
    const std::size_t rate_col = reference.column("rate");

    auto key_of = [&](const std::vector<std::string>& row) {
        std::string k;
        for (std::size_t c : mesh_cols) {
            k += (k.empty() ? "" : ",") + reference.header()[c] + "=" + row[c];
        }
        return k + " " + row[comp_col];
    };
    std::map<std::string, const std::vector<std::string>*> index;
    for (const auto& row : produced.rows()) {
        index[key_of(row)] = &row;
    }

    CompareResult res;
    for (const auto& ref : reference.rows()) {
        const std::string key = key_of(ref);
        const auto it = index.find(key);
        if (it == index.end()) {
            if (options.allow_missing) {
                ++res.skipped;
            } else {
                res.pass = false;
                res.failures.push_back(key + ": row missing from produced table");
            }
            continue;
        }
        const auto& row = *it->second;
        if (reference.has_column("norm")) {
            const std::size_t nc = reference.column("norm");
            if (row[nc] != ref[nc]) {
                res.pass = false;
                res.failures.push_back(key + ": norm '" + row[nc] + "' differs from reference norm '" + ref[nc] + "'");
            }
        }
        auto check = [&](std::size_t col, bool relative, double tol) {
            if (ref[col].empty()) {
                return;
            }
            const std::string cell = key + " " + reference.header()[col];
            const double r = to_number(ref[col], "reference " + cell);
            CellCheck c{cell, std::nan(""), r, std::nan(""), false};
            if (!row[col].empty()) {
                c.produced = to_number(row[col], "produced " + cell);
                c.diff = relative ? std::abs(c.produced - r) / std::abs(r) : std::abs(c.produced - r);
                c.ok = c.diff <= tol;
            }
            if (!c.ok) {
                res.pass = false;
                std::ostringstream msg;
                msg << cell << ": produced " << (row[col].empty() ? std::string("(empty)") : row[col])
                    << ", reference " << ref[col];
                if (std::isfinite(c.diff)) {
                    msg << ", " << (relative ? "relative" : "absolute") << " difference " << c.diff << " > " << tol;
                }
                res.failures.push_back(msg.str());
            }
            res.checks.push_back(c);
        };
        check(err_col, true, options.error_tol);
        check(rate_col, false, options.rate_tol);
    }
    return res;
}

void CompareResult::write(std::ostream& os) const
{
    os << "cell,produced,reference,diff,status\n";
    for (const auto& c : checks) {
        os << c.cell << ',' << std::setprecision(6) << c.produced << ',' << c.reference << ',' << c.diff << ','
           << (c.ok ? "ok" : "FAIL") << '\n';
    }
    for (const auto& f : failures) {
        os << "# " << f << '\n';
    }
    if (skipped) {
        os << "# " << skipped << " reference rows without produced counterpart skipped\n";
    }
    os << "# result: " << (pass ? "pass" : "fail") << '\n';
}

std::vector<std::string> reference_names()
{
    std::vector<std::string> out;
    for (const auto& [name, text] : detail::embedded_references()) {
        out.emplace_back(name);
    }
    return out;
}

ResultTable reference_table(const std::string& name)
{
    for (const auto& [n, text] : detail::embedded_references()) {
        if (n == name) {
            return ResultTable::parse(std::string(text));
        }
    }
    throw std::invalid_argument("unknown reference table '" + name + "'");
}

}  // namespace macelast
