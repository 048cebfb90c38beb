#include "entdyn/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "entdyn/mean_field.hpp"

namespace entdyn {

std::string fmt_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string fmt_complex(Cplx z) {
    std::string out = fmt_g17(z.real());
    out += (z.imag() < 0.0) ? "-" : "+";
    out += fmt_g17(std::abs(z.imag()));
    out += "j";
    return out;
}

Cplx parse_complex(const std::string& token) {
    // re, or re+imj / re-imj with the exponent signs handled by strtod
    const char* p = token.c_str();
    char* end = nullptr;
    const double re = std::strtod(p, &end);
    if (end == p) {
        throw std::invalid_argument("parse_complex: bad token '" + token + "'");
    }
    if (*end == '\0') {
        return {re, 0.0};
    }
    if (*end != '+' && *end != '-') {
        throw std::invalid_argument("parse_complex: bad token '" + token + "'");
    }
    const char* q = end;
    char* end2 = nullptr;
    const double im = std::strtod(q, &end2);
    if (end2 == q || *end2 != 'j' || *(end2 + 1) != '\0') {
        throw std::invalid_argument("parse_complex: bad token '" + token + "'");
    }
    return {re, im};
}

Mat read_matrix(std::istream& is, const std::string& what) {
    std::vector<std::vector<Cplx>> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::istringstream ls(line);
        std::vector<Cplx> row;
        std::string token;
        while (ls >> token) {
            row.push_back(parse_complex(token));
        }
        if (!row.empty()) {
            rows.push_back(std::move(row));
        }
    }
    if (rows.empty()) {
        throw std::invalid_argument(what + ": no data rows");
    }
    const size_t cols = rows.front().size();
    for (const auto& r : rows) {
        if (r.size() != cols) {
            throw std::invalid_argument(what + ": ragged rows");
        }
    }
    Mat m(rows.size(), cols);
    for (size_t i = 0; i < rows.size(); ++i) {
        for (size_t j = 0; j < cols; ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return m;
}

Mat read_matrix_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw std::runtime_error("cannot open matrix file: " + path);
    }
    return read_matrix(f, path);
}

Vec read_vector_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw std::runtime_error("cannot open vector file: " + path);
    }
    const Mat m = read_matrix(f, path);
    if (m.cols() != 1) {
        throw std::invalid_argument(path + ": expected one entry per line");
    }
    return m.col(0);
}

void write_matrix(std::ostream& os, const Mat& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) {
                os << ' ';
            }
            os << fmt_complex(m(i, j));
        }
        os << '\n';
    }
}

void write_vector(std::ostream& os, const Vec& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        os << fmt_complex(v(i)) << '\n';
    }
}

void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryPoint>& points) {
    os << "t,P,beta,fidelity_sq,sx,sy,sz,norm_I,norm_II\n";
    for (const auto& p : points) {
        os << fmt_g17(p.t) << ',' << fmt_g17(p.p) << ',';
        if (p.has_beta) {
            os << fmt_g17(p.beta);
        }
        os << ',' << fmt_g17(p.fidelity_sq) << ',';
        if (p.has_bloch) {
            os << fmt_g17(p.sx) << ',' << fmt_g17(p.sy) << ',' << fmt_g17(p.sz);
        } else {
            os << ",,";
        }
        os << ',' << fmt_g17(p.norm_i) << ',' << fmt_g17(p.norm_ii) << '\n';
    }
}

}  // namespace entdyn
