#include "hara/graph_io.h"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <string_view>
#include <fstream>
#include <sstream>

#include "hara/error.h"

namespace hara {
namespace {

struct ParsedFile {
  int num_nodes = -1;
  std::vector<RelEdge> edges;
  std::vector<std::pair<NodeId, Rotation>> absolutes;
};

[[noreturn]] void Fail(ErrorCode code, int line, const std::string& msg) {
  throw Error(code, "line " + std::to_string(line) + ": " + msg);
}

std::vector<std::string_view> Tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t p = 0;
  while (p < s.size()) {
    while (p < s.size() && std::isspace(static_cast<unsigned char>(s[p]))) ++p;
    const std::size_t b = p;
    while (p < s.size() && !std::isspace(static_cast<unsigned char>(s[p]))) ++p;
    if (p > b) out.push_back(s.substr(b, p - b));
  }
  return out;
}

long ParseInt(std::string_view t, int line) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    Fail(ErrorCode::kParseError, line,
         "expected an integer, got '" + std::string(t) + "'");
  }
  return v;
}

double ParseDouble(std::string_view t, int line) {
  // strtod round-trips 17-digit output exactly.
  const std::string s(t);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) {
    Fail(ErrorCode::kParseError, line, "expected a number, got '" + s + "'");
  }
  return v;
}

Rotation ParseQuat(const std::vector<std::string_view>& tok, std::size_t at,
                   int line) {
  try {
    return Rotation::FromQuaternion(
        ParseDouble(tok[at], line), ParseDouble(tok[at + 1], line),
        ParseDouble(tok[at + 2], line), ParseDouble(tok[at + 3], line));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInvalidArgument) throw;
    Fail(ErrorCode::kParseError, line, e.what());
  }
}

ParsedFile Parse(std::istream& in) {
  ParsedFile f;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto tok = Tokens(raw);
    if (tok.empty() || tok[0].front() == '#') continue;
    const std::string_view kind = tok[0];
    if (kind == "N") {
      if (f.num_nodes >= 0) Fail(ErrorCode::kParseError, line, "repeated N record");
      if (tok.size() != 2) Fail(ErrorCode::kMissingField, line, "N needs a count");
      const long n = ParseInt(tok[1], line);
      if (n < 0) Fail(ErrorCode::kParseError, line, "negative node count");
      f.num_nodes = static_cast<int>(n);
      continue;
    }
    if (f.num_nodes < 0) {
      Fail(ErrorCode::kMissingField, line, "N record must come first");
    }
    if (kind == "E") {
      if (tok.size() < 7) {
        Fail(ErrorCode::kMissingField, line, "E needs i j qw qx qy qz [inliers]");
      }
      if (tok.size() > 8) Fail(ErrorCode::kParseError, line, "trailing fields");
      RelEdge e;
      e.i = static_cast<NodeId>(ParseInt(tok[1], line));
      e.j = static_cast<NodeId>(ParseInt(tok[2], line));
      e.rel = ParseQuat(tok, 3, line);
      if (tok.size() == 8) {
        const long c = ParseInt(tok[7], line);
        if (c < 0) Fail(ErrorCode::kParseError, line, "negative inlier count");
        e.inlier_count = static_cast<int>(c);
      }
      f.edges.push_back(e);
    } else if (kind == "G") {
      if (tok.size() < 6) Fail(ErrorCode::kMissingField, line, "G needs i qw qx qy qz");
      if (tok.size() > 6) Fail(ErrorCode::kParseError, line, "trailing fields");
      const auto i = static_cast<NodeId>(ParseInt(tok[1], line));
      if (i < 0 || i >= f.num_nodes) {
        Fail(ErrorCode::kInvalidNode, line, "G node out of range");
      }
      f.absolutes.emplace_back(i, ParseQuat(tok, 2, line));
    } else {
      Fail(ErrorCode::kParseError, line,
           "unknown record type '" + std::string(kind) + "'");
    }
  }
  if (f.num_nodes < 0) throw Error(ErrorCode::kMissingField, "missing N record");
  return f;
}

void WriteQuat(std::ostream& out, const Rotation& r) {
  const Eigen::Quaterniond& q = r.quaternion();
  out << ' ' << q.w() << ' ' << q.x() << ' ' << q.y() << ' ' << q.z();
}

std::ifstream OpenIn(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  return in;
}

}  // namespace

ViewGraph ReadGraph(std::istream& in) {
  ParsedFile f = Parse(in);
  std::vector<std::optional<Rotation>> gt(f.num_nodes);
  for (const auto& [i, r] : f.absolutes) gt[i] = r;
  return ViewGraph::Build(f.num_nodes, std::move(f.edges), std::move(gt));
}

void WriteGraph(const ViewGraph& g, std::ostream& out) {
  const auto old_precision = out.precision(17);
  out << "N " << g.num_nodes() << '\n';
  for (const RelEdge& e : g.edges()) {
    out << "E " << e.i << ' ' << e.j;
    WriteQuat(out, e.rel);
    if (e.inlier_count) out << ' ' << *e.inlier_count;
    out << '\n';
  }
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    if (!g.ground_truth()[i]) continue;
    out << "G " << i;
    WriteQuat(out, *g.ground_truth()[i]);
    out << '\n';
  }
  out.precision(old_precision);
}

ViewGraph LoadGraph(const std::string& path) {
  std::ifstream in = OpenIn(path);
  return ReadGraph(in);
}

void SaveGraph(const ViewGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  WriteGraph(g, out);
}

void WriteRotations(std::span<const std::optional<Rotation>> rotations,
                    std::ostream& out) {
  const auto old_precision = out.precision(17);
  out << "N " << rotations.size() << '\n';
  for (std::size_t i = 0; i < rotations.size(); ++i) {
    if (!rotations[i]) continue;
    out << "G " << i;
    WriteQuat(out, *rotations[i]);
    out << '\n';
  }
  out.precision(old_precision);
}

std::vector<std::optional<Rotation>> LoadRotations(const std::string& path) {
  std::ifstream in = OpenIn(path);
  ParsedFile f = Parse(in);
  std::vector<std::optional<Rotation>> out(f.num_nodes);
  for (const auto& [i, r] : f.absolutes) out[i] = r;
  return out;
}

}  // namespace hara
