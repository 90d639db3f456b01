#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace asrsim {

// FNV-1a 64-bit. Used for resource identities and config digests; stable
// across platforms and runs, unlike std::hash.
std::uint64_t fnv1a64(const void* data, std::size_t len,
                      std::uint64_t seed = 14695981039346656037ULL);
std::uint64_t fnv1a64(const std::string& s);

// Hash of a file's full contents, formatted as "basename:hex64".
// Throws std::runtime_error if the file cannot be read.
std::string file_identity(const std::string& path);

std::string to_lower(const std::string& s);
std::vector<std::string> split_ws(const std::string& line);
std::vector<std::string> split_char(const std::string& line, char sep);
std::string trim(const std::string& s);

// Shortest-representation text forms used by the serializers.
// format_real_12 is the on-disk table encoding (12 significant digits,
// byte-stable across platforms); format_real_9 is the TSV vector export.
std::string format_real_12(double v);
std::string format_real_9(double v);

// Deterministic randomness. std::mt19937_64 output is specified by the
// standard, but std::uniform_int_distribution and std::shuffle are not,
// so the artifact rolls its own bounded draw and Fisher-Yates.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : engine_(seed) {}

  // Uniform integer in [0, bound) via rejection sampling (no modulo bias).
  std::uint64_t bounded(std::uint64_t bound);

  // Uniform double in [0, 1) with 53 random bits.
  double unit();

  template <typename T>
  void shuffle(std::vector<T>& v) {
    if (v.size() < 2) return;
    for (std::size_t i = v.size() - 1; i > 0; --i) {
      std::size_t j = static_cast<std::size_t>(bounded(i + 1));
      std::swap(v[i], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// round(x), half away from zero; shared by every count rule of the form
// round(rate * total).
long long round_half_away(double x);

}  // namespace asrsim
