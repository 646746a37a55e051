#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "skel/paths.hpp"
#include "skel/skeleton.hpp"

namespace skel {

// Shortest round-trip decimal form of a double.
std::string format_double(double x);

// FNV-1a 64-bit; used as the manifest content hash.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hash_hex(std::uint64_t h);

// Path dump: "# dt=<dt> horizon=<h> seed=<seed>" header line, then one value
// per line. Deterministic given (path, seed).
void write_path_csv(const std::string& file, const ContinuousPath& p, std::uint64_t seed);
ContinuousPath read_path_csv(const std::string& file);

// Skeleton dump: header "n,T_n,sign,level", one row per arrival.
void write_skeleton_csv(const std::string& file, const Skeleton& s);
Skeleton read_skeleton_csv(const std::string& file, double horizon_hint = 0.0);

// Column-oriented series file for external plotting (x,y pairs).
void write_xy_csv(const std::string& file, const std::string& xname, const std::string& yname,
                  const std::vector<double>& x, const std::vector<double>& y);

}  // namespace skel
