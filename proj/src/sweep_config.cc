#include <fstream>
#include <sstream>

#include "hara/error.h"
#include "hara/sweep.h"

namespace hara {
namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void Fail(int line, const std::string& msg) {
  throw Error(ErrorCode::kParseError,
              "sweep config line " + std::to_string(line) + ": " + msg);
}

double Number(const std::string& tok, int line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    Fail(line, "expected a number, got '" + tok + "'");
  }
  if (used != tok.size()) Fail(line, "expected a number, got '" + tok + "'");
  return v;
}

std::vector<double> Numbers(const std::string& value, int line) {
  std::vector<double> out;
  if (value.front() != '[') {
    out.push_back(Number(value, line));
    return out;
  }
  if (value.back() != ']') Fail(line, "unterminated list");
  std::stringstream body(value.substr(1, value.size() - 2));
  std::string item;
  while (std::getline(body, item, ',')) {
    item = Trim(item);
    if (!item.empty()) out.push_back(Number(item, line));
  }
  if (out.empty()) Fail(line, "empty list");
  return out;
}

std::string Quoted(const std::string& value, int line) {
  if (value.size() < 2 || value.front() != '"' || value.back() != '"') {
    Fail(line, "expected a quoted string");
  }
  return value.substr(1, value.size() - 2);
}

}  // namespace

SweepFile ParseSweepConfig(const std::string& text) {
  SweepFile f;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) {
      raw.resize(hash);
    }
    raw = Trim(raw);
    if (raw.empty()) continue;
    const auto eq = raw.find('=');
    if (eq == std::string::npos) Fail(line, "expected key = value");
    const std::string key = Trim(raw.substr(0, eq));
    const std::string value = Trim(raw.substr(eq + 1));
    if (value.empty()) Fail(line, "missing value for '" + key + "'");
    if (key == "n") {
      f.grid.n.clear();
      for (double v : Numbers(value, line)) f.grid.n.push_back(static_cast<int>(v));
    } else if (key == "p") {
      f.grid.p = Numbers(value, line);
    } else if (key == "q") {
      f.grid.q = Numbers(value, line);
    } else if (key == "sigma") {
      f.grid.sigma_deg = Numbers(value, line);
    } else if (key == "trials") {
      f.grid.trials = static_cast<int>(Number(value, line));
    } else if (key == "seed") {
      f.grid.base_seed = static_cast<std::uint64_t>(Number(value, line));
    } else if (key == "noise") {
      const std::string m = Quoted(value, line);
      if (m == "axis-angle") {
        f.grid.noise = NoiseModel::kAxisAngle;
      } else if (m == "isotropic") {
        f.grid.noise = NoiseModel::kIsotropic;
      } else {
        Fail(line, "unknown noise model '" + m + "'");
      }
    } else if (key == "tau") {
      f.tau = Number(value, line);
    } else if (key == "s_init") {
      f.s_init = static_cast<int>(Number(value, line));
    } else {
      Fail(line, "unknown key '" + key + "'");
    }
  }
  if (f.grid.trials < 1) throw Error(ErrorCode::kInvalidConfig, "trials must be >= 1");
  return f;
}

SweepFile LoadSweepConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseSweepConfig(ss.str());
}

}  // namespace hara
