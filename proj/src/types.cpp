#include "mmw/types.hpp"
#include "mmw/random.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace mmw {

namespace {

std::string upper(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

}  // namespace

std::string to_string(Polarization p) { return p == Polarization::LPOL ? "LPOL" : "XPOL"; }

std::string to_string(SchedulerKind s) { return s == SchedulerKind::RR ? "RR" : "PF"; }

std::string to_string(TransmissionMode) { return "CLSM"; }

Polarization parse_polarization(std::string_view text) {
  const auto u = upper(text);
  if (u == "LPOL") return Polarization::LPOL;
  if (u == "XPOL") return Polarization::XPOL;
  throw std::invalid_argument("unknown polarization '" + std::string(text) + "' (expected LPOL or XPOL)");
}

SchedulerKind parse_scheduler(std::string_view text) {
  const auto u = upper(text);
  if (u == "RR") return SchedulerKind::RR;
  if (u == "PF") return SchedulerKind::PF;
  throw std::invalid_argument("unknown scheduler '" + std::string(text) + "' (expected RR or PF)");
}

TransmissionMode parse_transmission_mode(std::string_view text) {
  if (upper(text) == "CLSM") return TransmissionMode::CLSM;
  throw std::invalid_argument("unknown transmission mode '" + std::string(text) + "' (expected CLSM)");
}

double wrap_degrees(double deg) {
  double w = std::fmod(deg + 180.0, 360.0);
  if (w < 0) w += 360.0;
  return w - 180.0;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng make_stream(std::uint64_t seed, StreamTag tag, std::initializer_list<std::uint64_t> ids) {
  std::uint64_t h = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(tag)));
  for (auto id : ids) h = splitmix64(h ^ splitmix64(id + 0x632BE59BD9B4E019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                    static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return Rng(seq);
}

}  // namespace mmw
