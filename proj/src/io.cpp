#include "gof/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace gof {

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, delim)) out.push_back(field);
    if (!line.empty() && line.back() == delim) out.push_back("");
    return out;
}

bool parse_double(const std::string& s, double& out) {
    const char* begin = s.c_str();
    char* end = nullptr;
    errno = 0;
    out = std::strtod(begin, &end);
    if (end == begin || errno == ERANGE) return false;
    while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
    return *end == '\0';
}

}  // namespace

Matrix load_matrix(const std::string& path, char delimiter) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset file: " + path);

    Matrix mat;
    std::string line;
    std::size_t line_no = 0;
    bool first_data_line = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_line(line, delimiter);
        std::vector<double> row;
        row.reserve(fields.size());
        bool ok = true;
        for (const auto& f : fields) {
            double v;
            if (!parse_double(f, v)) {
                ok = false;
                break;
            }
            row.push_back(v);
        }
        if (!ok) {
            if (first_data_line) continue;  // header line
            std::ostringstream os;
            os << path << ":" << line_no << ": unparsable numeric field";
            throw DataError(os.str());
        }
        if (mat.cols == 0) {
            mat.cols = row.size();
        } else if (row.size() != mat.cols) {
            std::ostringstream os;
            os << path << ":" << line_no << ": expected " << mat.cols << " columns, got "
               << row.size();
            throw DataError(os.str());
        }
        mat.values.insert(mat.values.end(), row.begin(), row.end());
        ++mat.rows;
        first_data_line = false;
    }
    if (mat.rows == 0) throw DataError(path + ": no data rows");
    return mat;
}

RescaleInfo pooled_rescale(const std::vector<const Matrix*>& mats) {
    if (mats.empty() || mats.front()->cols == 0)
        throw ContractError("pooled_rescale: no data");
    const std::size_t cols = mats.front()->cols;
    RescaleInfo info;
    info.min.assign(cols, std::numeric_limits<double>::infinity());
    info.max.assign(cols, -std::numeric_limits<double>::infinity());
    for (const Matrix* m : mats) {
        if (m->cols != cols) throw ContractError("pooled_rescale: column count mismatch");
        for (std::size_t r = 0; r < m->rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
                info.min[c] = std::min(info.min[c], m->at(r, c));
                info.max[c] = std::max(info.max[c], m->at(r, c));
            }
        }
    }
    return info;
}

Sample to_sample(const Matrix& mat, const std::optional<RescaleInfo>& rescale) {
    std::vector<double> out(mat.values.size());
    for (std::size_t r = 0; r < mat.rows; ++r) {
        for (std::size_t c = 0; c < mat.cols; ++c) {
            double v = mat.at(r, c);
            if (rescale) {
                const double lo = rescale->min[c], hi = rescale->max[c];
                v = (hi > lo) ? (v - lo) / (hi - lo) : 0.5;
            }
            if (!(v >= 0.0 && v <= 1.0)) {
                std::ostringstream os;
                os << "value " << v << " at row " << (r + 1) << ", column " << (c + 1)
                   << " lies outside [0,1]; pass --rescale to map data into the unit cube";
                throw DataError(os.str());
            }
            out[r * mat.cols + c] = v;
        }
    }
    return Sample(std::move(out), static_cast<std::uint32_t>(mat.cols));
}

std::string risk_csv_string(const RiskTable& table) {
    std::ostringstream os;
    os << "d,m,epsilon,type1,type2,risk,se,runtime_s\n";
    os.precision(12);
    for (const auto& r : table.rows) {
        os << r.d << ',' << r.m << ',' << r.epsilon << ',' << r.type1 << ',' << r.type2 << ','
           << r.risk << ',' << r.se << ',' << r.runtime_s << '\n';
    }
    return os.str();
}

void write_risk_csv(const RiskTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open output file: " + path);
    out << risk_csv_string(table);
}

}  // namespace gof
