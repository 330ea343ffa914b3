#include "mtsdvgan/data/series.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mtsdvgan/error.hpp"

namespace mtsdvgan::data {
namespace {

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(std::move(cur));
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    cells.push_back(std::move(cur));
    return cells;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::string where(const std::string& source, std::size_t line) {
    return source + ":" + std::to_string(line) + ": ";
}

double parse_cell(const std::string& raw, const std::string& source, std::size_t line, const std::string& column) {
    const std::string cell = trim(raw);
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (!cell.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (cell.empty() || ec != std::errc() || ptr != last)
        throw ValidationError(where(source, line) + "non-numeric value '" + cell + "' in column '" + column + "'");
    if (!std::isfinite(v))
        throw ValidationError(where(source, line) + "non-finite value '" + cell + "' in column '" + column + "'");
    return v;
}

}  // namespace

void RawSeries::validate() const {
    if (values.rows() < 1 || values.cols() < 1) throw ValidationError("series must have T >= 1 and N >= 1");
    if (!values.allFinite()) throw ValidationError("series contains non-finite values");
    if (!feature_names.empty() && static_cast<Eigen::Index>(feature_names.size()) != values.cols())
        throw ValidationError("feature_names length does not match column count");
    if (labels) {
        if (static_cast<Eigen::Index>(labels->size()) != values.rows())
            throw ValidationError("labels length does not match series length");
        for (std::size_t t = 0; t < labels->size(); ++t)
            if ((*labels)[t] > 1) throw ValidationError("label at row " + std::to_string(t) + " is not 0 or 1");
    }
}

RawSeries RawSeries::slice(Eigen::Index begin, Eigen::Index end) const {
    if (begin < 0 || end > length() || begin >= end) throw ValidationError("invalid series slice");
    RawSeries out;
    out.values = values.middleRows(begin, end - begin);
    out.feature_names = feature_names;
    if (labels) out.labels = Labels(labels->begin() + begin, labels->begin() + end);
    return out;
}

RawSeries parse_csv(std::istream& in, bool has_labels, const std::string& source) {
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(source + ": empty file (no header row)");
    const auto header = split_row(line);

    int label_col = -1;
    RawSeries out;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const auto name = trim(header[c]);
        if (name == "label") {
            label_col = static_cast<int>(c);
        } else {
            out.feature_names.push_back(name);
        }
    }
    // A `label` column present in an unlabeled read is still excluded from the features.
    if (has_labels && label_col < 0) throw ValidationError(source + ": missing 'label' column");
    if (out.feature_names.empty()) throw ValidationError(source + ": no feature columns");

    std::vector<double> flat;
    Labels labels;
    std::size_t line_no = 1;
    std::size_t rows = 0;
    const std::size_t n = out.feature_names.size();
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_row(line);
        if (cells.size() != header.size())
            throw ValidationError(where(source, line_no) + "expected " + std::to_string(header.size()) +
                                  " cells, found " + std::to_string(cells.size()));
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (static_cast<int>(c) == label_col) {
                if (!has_labels) continue;
                const auto cell = trim(cells[c]);
                if (cell == "0") {
                    labels.push_back(0);
                } else if (cell == "1") {
                    labels.push_back(1);
                } else {
                    throw ValidationError(where(source, line_no) + "invalid label '" + cell + "' (row " +
                                          std::to_string(rows + 1) + "); labels must be 0 or 1");
                }
            } else {
                flat.push_back(parse_cell(cells[c], source, line_no, trim(header[c])));
            }
        }
        ++rows;
    }
    if (rows == 0) throw ValidationError(source + ": empty body (no data rows)");

    out.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < n; ++c)
            out.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = flat[r * n + c];
    if (has_labels) out.labels = std::move(labels);
    return out;
}

RawSeries load_csv(const std::filesystem::path& path, bool has_labels) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path.string() + "'");
    return parse_csv(in, has_labels, path.string());
}

void write_csv(std::ostream& out, const RawSeries& series) {
    series.validate();
    for (Eigen::Index c = 0; c < series.features(); ++c) {
        if (c) out << ',';
        if (series.feature_names.empty()) {
            out << "f" << c;
        } else {
            out << series.feature_names[static_cast<std::size_t>(c)];
        }
    }
    if (series.labels) out << ",label";
    out << '\n';
    char buf[64];
    for (Eigen::Index t = 0; t < series.length(); ++t) {
        for (Eigen::Index c = 0; c < series.features(); ++c) {
            if (c) out << ',';
            auto res = std::to_chars(buf, buf + sizeof(buf), series.values(t, c));
            out.write(buf, res.ptr - buf);
        }
        if (series.labels) out << ',' << static_cast<int>((*series.labels)[static_cast<std::size_t>(t)]);
        out << '\n';
    }
}

void save_csv(const std::filesystem::path& path, const RawSeries& series) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ValidationError("cannot open '" + path.string() + "' for writing");
    write_csv(out, series);
}

}  // namespace mtsdvgan::data
