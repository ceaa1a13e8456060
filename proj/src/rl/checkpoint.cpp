#include "ecodrive/rl/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "ecodrive/csv.hpp"

namespace ecodrive::rl {
namespace {

constexpr const char* kMagic = "ecodrive-qnet";
constexpr int kVersion = 1;

std::string hexfloat(float value) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%a", static_cast<double>(value));
  return buf;
}

float parse_float(const std::string& token) {
  char* end = nullptr;
  const float value = std::strtof(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0') throw std::runtime_error("checkpoint: bad number '" + token + "'");
  return value;
}

template <typename T>
T expect(std::istream& in, const char* what) {
  T value{};
  if (!(in >> value)) throw std::runtime_error(std::string("checkpoint: truncated while reading ") + what);
  return value;
}

void expect_word(std::istream& in, const std::string& word) {
  if (expect<std::string>(in, word.c_str()) != word) throw std::runtime_error("checkpoint: expected '" + word + "'");
}

}  // namespace

std::uint64_t config_hash(const NetworkShape& shape, const StackSpec& stack, const FeatureScale& f) {
  std::ostringstream canon;
  canon << "in " << shape.inputs << " shared";
  for (int w : shape.shared) canon << ' ' << w;
  canon << " stream";
  for (int w : shape.stream) canon << ' ' << w;
  canon << " actions " << shape.actions << " select " << stack.select << " stack " << stack.stack << " scale "
        << csv::num(f.time) << ' ' << csv::num(f.road) << ' ' << csv::num(f.sensor) << ' ' << csv::num(f.speed)
        << ' ' << csv::num(f.accel) << " codec " << kActionCount << ' ' << csv::num(kActionAccel);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canon.str()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void save_checkpoint(std::ostream& out, const Network& net, std::uint64_t hash) {
  const NetworkShape& s = net.shape();
  out << kMagic << ' ' << kVersion << '\n';
  out << "hash " << std::hex << std::setw(16) << std::setfill('0') << hash << std::dec << std::setfill(' ') << '\n';
  out << "inputs " << s.inputs << " actions " << s.actions << '\n';
  out << "shared " << s.shared.size();
  for (int w : s.shared) out << ' ' << w;
  out << "\nstream " << s.stream.size();
  for (int w : s.stream) out << ' ' << w;
  out << '\n';
  for (const auto& d : net.layers()) {
    out << "layer " << d.W.rows() << ' ' << d.W.cols() << '\n';
    for (long c = 0; c < d.W.cols(); ++c) {
      for (long r = 0; r < d.W.rows(); ++r) out << hexfloat(d.W(r, c)) << (r + 1 < d.W.rows() ? ' ' : '\n');
    }
    for (long r = 0; r < d.b.size(); ++r) out << hexfloat(d.b(r)) << (r + 1 < d.b.size() ? ' ' : '\n');
  }
  if (!out) throw std::runtime_error("checkpoint: write failed");
}

void save_checkpoint(const std::string& path, const Network& net, std::uint64_t hash) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("checkpoint: cannot open " + path);
  save_checkpoint(out, net, hash);
}

LoadedCheckpoint load_checkpoint(std::istream& in, std::optional<std::uint64_t> expected_hash) {
  expect_word(in, kMagic);
  if (expect<int>(in, "version") != kVersion) throw std::runtime_error("checkpoint: unsupported version");
  expect_word(in, "hash");
  const std::string hash_text = expect<std::string>(in, "hash");
  LoadedCheckpoint out;
  out.hash = std::stoull(hash_text, nullptr, 16);
  if (expected_hash && *expected_hash != out.hash)
    throw std::runtime_error("checkpoint: configuration hash mismatch (file " + hash_text + ")");

  NetworkShape shape;
  expect_word(in, "inputs");
  shape.inputs = expect<int>(in, "inputs");
  expect_word(in, "actions");
  shape.actions = expect<int>(in, "actions");
  auto read_list = [&](const char* name) {
    expect_word(in, name);
    std::vector<int> widths(expect<std::size_t>(in, name));
    for (auto& w : widths) w = expect<int>(in, name);
    return widths;
  };
  shape.shared = read_list("shared");
  shape.stream = read_list("stream");

  out.network = Network(shape, 0);
  for (auto& d : out.network.layers()) {
    expect_word(in, "layer");
    const long rows = expect<long>(in, "layer rows");
    const long cols = expect<long>(in, "layer cols");
    if (rows != d.W.rows() || cols != d.W.cols()) throw std::runtime_error("checkpoint: layer shape mismatch");
    for (long c = 0; c < cols; ++c)
      for (long r = 0; r < rows; ++r) d.W(r, c) = parse_float(expect<std::string>(in, "weight"));
    for (long r = 0; r < rows; ++r) d.b(r) = parse_float(expect<std::string>(in, "bias"));
  }
  return out;
}

LoadedCheckpoint load_checkpoint(const std::string& path, std::optional<std::uint64_t> expected_hash) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  return load_checkpoint(in, expected_hash);
}

}  // namespace ecodrive::rl
