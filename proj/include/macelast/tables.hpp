#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace macelast {

/// Convergence table in the CSV schema
/// level,nx,ny[,nz],component,norm,error,rate,residual
/// (plain comma separated, no quoting, empty cells allowed).
class ResultTable {
public:
    ResultTable() = default;
    ResultTable(std::vector<std::string> header, std::vector<std::vector<std::string>> rows);

    static ResultTable parse(std::istream& is);
    static ResultTable parse(const std::string& text);
    static ResultTable load(const std::string& path);

    const std::vector<std::string>& header() const { return header_; }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }
    std::vector<std::vector<std::string>>& rows() { return rows_; }
    /// Column position; throws std::out_of_range when absent.
    std::size_t column(const std::string& name) const;
    bool has_column(const std::string& name) const;

    void write(std::ostream& os) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

class SchemaError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct CompareOptions {
    double error_tol = 0.02;   // relative
    double rate_tol = 0.05;    // absolute
    /// Reference rows without a produced counterpart are skipped instead of failing.
    bool allow_missing = false;
};

struct CellCheck {
    std::string cell;  // "nx=8,ny=8 Wx error"
    double produced = 0.0;
    double reference = 0.0;
    double diff = 0.0;  // relative for errors, absolute for rates
    bool ok = false;
};

struct CompareResult {
    bool pass = true;
    std::vector<CellCheck> checks;
    std::vector<std::string> failures;  // one message per failing or missing cell
    std::size_t skipped = 0;            // missing rows tolerated by allow_missing

    void write(std::ostream& os) const;
};

/// Checks every error and rate cell of `reference` against the row of
/// `produced` with the same mesh and component. Reference cells left empty
/// are not checked. Throws SchemaError when the two headers differ.
CompareResult compare(const ResultTable& produced, const ResultTable& reference, const CompareOptions& options = {});

/// Names of the reference tables compiled into the library ("table6_3", ...).
std::vector<std::string> reference_names();
/// Throws std::invalid_argument for an unknown name.
ResultTable reference_table(const std::string& name);

}  // namespace macelast
