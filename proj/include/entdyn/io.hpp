#pragma once

// Text serialization: 17-significant-digit numeric formatting (round-trip
// exact for doubles), complex matrix/vector files, and the trajectory CSV.
//
// Matrix file format: one row per line, whitespace-separated entries written
// as "re+imj" / "re-imj" pairs, e.g. "0.5+0j 0-1j". Vector files hold one
// entry per line. Lines starting with '#' are comments.

#include <iosfwd>
#include <string>
#include <vector>

#include "entdyn/operator_core.hpp"

namespace entdyn {

struct TrajectoryPoint;

std::string fmt_g17(double x);
std::string fmt_complex(Cplx z);

Cplx parse_complex(const std::string& token);

Mat read_matrix(std::istream& is, const std::string& what);
Mat read_matrix_file(const std::string& path);
Vec read_vector_file(const std::string& path);
void write_matrix(std::ostream& os, const Mat& m);
void write_vector(std::ostream& os, const Vec& v);

// Header is exactly: t,P,beta,fidelity_sq,sx,sy,sz,norm_I,norm_II.
// beta and the Bloch columns are left empty when not applicable.
void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryPoint>& points);

}  // namespace entdyn
