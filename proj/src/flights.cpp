#include "flowlens/flights.hpp"

#include <charconv>
#include <random>
#include <string>

namespace flowlens {

namespace {

void put_fixed1(std::string& out, double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 1);
    std::string_view s(buf, static_cast<std::size_t>(ptr - buf));
    out += s == "-0.0" ? "0.0" : s;
}

} // namespace

void write_flights_csv(std::ostream& out, std::size_t rows, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> distance(100.0, 5000.0);
    std::normal_distribution<double> noise(0.0, 30.0);
    std::string buf = "distance,delay\n";
    for (std::size_t i = 0; i < rows; ++i) {
        double d = distance(rng);
        double delay = 10.0 + d / 200.0 + noise(rng);
        put_fixed1(buf, d);
        buf += ',';
        put_fixed1(buf, delay);
        buf += '\n';
        if (buf.size() > (1 << 16)) {
            out << buf;
            buf.clear();
        }
    }
    out << buf;
}

} // namespace flowlens
