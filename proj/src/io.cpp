#include "skel/io.hpp"

#include <cinttypes>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace skel {

std::string format_double(double x) {
    char buf[40];
    // %.17g always round-trips; trim to shorter form when exact.
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) return buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

void write_path_csv(const std::string& file, const ContinuousPath& p, std::uint64_t seed) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot open for write: " + file);
    out << "# dt=" << format_double(p.dt) << " horizon=" << format_double(p.horizon())
        << " seed=" << seed << "\n";
    for (double v : p.values) out << format_double(v) << "\n";
}

ContinuousPath read_path_csv(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open for read: " + file);
    std::string header;
    std::getline(in, header);
    ContinuousPath p;
    const auto pos = header.find("dt=");
    if (pos == std::string::npos) throw std::runtime_error("bad path header in " + file);
    p.dt = std::strtod(header.c_str() + pos + 3, nullptr);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        p.values.push_back(std::strtod(line.c_str(), nullptr));
    }
    return p;
}

void write_skeleton_csv(const std::string& file, const Skeleton& s) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot open for write: " + file);
    out << "# epsilon=" << format_double(s.epsilon) << " horizon=" << format_double(s.horizon)
        << "\n";
    out << "n,T_n,sign,level\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        out << (i + 1) << ',' << format_double(s.arrival_times[i]) << ','
            << static_cast<int>(s.signs[i]) << ',' << s.levels[i] << "\n";
    }
}

Skeleton read_skeleton_csv(const std::string& file, double horizon_hint) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open for read: " + file);
    Skeleton s;
    std::string line;
    std::getline(in, line);
    auto pos = line.find("epsilon=");
    if (pos == std::string::npos) throw std::runtime_error("bad skeleton header in " + file);
    s.epsilon = std::strtod(line.c_str() + pos + 8, nullptr);
    pos = line.find("horizon=");
    s.horizon = (pos == std::string::npos) ? horizon_hint
                                           : std::strtod(line.c_str() + pos + 8, nullptr);
    std::getline(in, line);  // column header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::getline(row, cell, ',');  // n, redundant
        std::getline(row, cell, ',');
        s.arrival_times.push_back(std::strtod(cell.c_str(), nullptr));
        std::getline(row, cell, ',');
        s.signs.push_back(static_cast<std::int8_t>(std::stoi(cell)));
        std::getline(row, cell, ',');
        s.levels.push_back(std::stoll(cell));
    }
    if (s.horizon == 0.0 && !s.arrival_times.empty()) s.horizon = s.arrival_times.back();
    return s;
}

void write_xy_csv(const std::string& file, const std::string& xname, const std::string& yname,
                  const std::vector<double>& x, const std::vector<double>& y) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot open for write: " + file);
    out << xname << ',' << yname << "\n";
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i)
        out << format_double(x[i]) << ',' << format_double(y[i]) << "\n";
}

}  // namespace skel
