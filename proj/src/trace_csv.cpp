#include "holeburn/io/trace_csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace holeburn::io {

namespace {

[[noreturn]] void fail(const std::string& label, int line,
                       const std::string& msg) {
  std::ostringstream os;
  os << label << ":" << line << ": " << msg;
  throw std::runtime_error(os.str());
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  return fields;
}

double parse_double(const std::string& s, const std::string& label,
                    int line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(label, line, "cannot parse number '" + s + "'");
  }
}

}  // namespace

std::string abscissa_column(TraceKind kind) {
  switch (kind) {
    case TraceKind::TemperatureSeries: return "T_K";
    case TraceKind::EchoTrain: return "n_idx";
    case TraceKind::HoleProfile: return "t_s";  // raw readout; f_hz accepted
    default: return "t_s";
  }
}

DecayTrace read_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file '" + path + "'");
  return read_trace(in, path);
}

DecayTrace read_trace(std::istream& in, const std::string& label) {
  DecayTrace trace;
  std::string line;
  int lineno = 0;
  bool have_kind = false;
  bool have_header = false;
  int n_columns = 0;

  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      const auto eq = t.find('=');
      if (eq == std::string::npos) continue;  // free-form comment
      const std::string key = trim(t.substr(1, eq - 1));
      const std::string value = trim(t.substr(eq + 1));
      if (key.empty()) continue;
      trace.metadata[key] = value;
      if (key == "kind") {
        try {
          trace.kind = trace_kind_from_string(value);
        } catch (const std::exception& e) {
          fail(label, lineno, e.what());
        }
        have_kind = true;
      } else if (key == "temperature_K") {
        trace.temperature_k = parse_double(value, label, lineno);
      }
      continue;
    }

    if (!have_header) {
      if (!have_kind) {
        fail(label, lineno,
             "missing '# kind = ...' metadata before the header row");
      }
      const auto cols = split_csv(t);
      if (cols.size() < 2 || cols.size() > 3) {
        fail(label, lineno, "expected 2 or 3 columns, got " +
                                std::to_string(cols.size()));
      }
      const std::string expected = abscissa_column(trace.kind);
      const bool abscissa_ok =
          cols[0] == expected ||
          (trace.kind == TraceKind::HoleProfile && cols[0] == "f_hz");
      if (!abscissa_ok) {
        fail(label, lineno,
             "abscissa column '" + cols[0] + "' does not match kind " +
                 to_string(trace.kind) + " (expected '" + expected + "')");
      }
      if (cols[1] != "y") {
        fail(label, lineno, "second column must be 'y', got '" + cols[1] + "'");
      }
      if (cols.size() == 3) {
        if (cols[2] != "sigma_y") {
          fail(label, lineno,
               "third column must be 'sigma_y', got '" + cols[2] + "'");
        }
        trace.has_sigma = true;
      }
      if (cols[0] == "f_hz") trace.metadata["abscissa"] = "f_hz";
      n_columns = static_cast<int>(cols.size());
      have_header = true;
      continue;
    }

    const auto fields = split_csv(t);
    if (static_cast<int>(fields.size()) != n_columns) {
      fail(label, lineno, "expected " + std::to_string(n_columns) +
                              " fields, got " +
                              std::to_string(fields.size()));
    }
    DecayTrace::Sample s;
    s.x = parse_double(fields[0], label, lineno);
    s.y = parse_double(fields[1], label, lineno);
    if (!std::isfinite(s.y)) fail(label, lineno, "y is not finite");
    if (trace.has_sigma) {
      s.sigma_y = parse_double(fields[2], label, lineno);
      if (!(s.sigma_y > 0.0)) {
        fail(label, lineno, "sigma_y must be > 0");
      }
    }
    if (!trace.samples.empty() && !(s.x > trace.samples.back().x)) {
      fail(label, lineno, "abscissa not strictly increasing");
    }
    trace.samples.push_back(s);
  }

  if (!have_header) {
    fail(label, lineno, "no header row found");
  }
  if (trace.samples.empty()) {
    fail(label, lineno, "no data rows found");
  }
  return trace;
}

void write_trace(std::ostream& out, const DecayTrace& trace) {
  auto metadata = trace.metadata;
  metadata["kind"] = to_string(trace.kind);
  if (trace.temperature_k > 0.0) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", trace.temperature_k);
    metadata["temperature_K"] = buf;
  }
  std::string abscissa = abscissa_column(trace.kind);
  const auto ab = metadata.find("abscissa");
  if (ab != metadata.end()) {
    abscissa = ab->second;
    metadata.erase(ab);
  }
  for (const auto& [k, v] : metadata) {
    out << "# " << k << " = " << v << "\n";
  }
  out << abscissa << ",y";
  if (trace.has_sigma) out << ",sigma_y";
  out << "\n";
  char buf[192];
  for (const auto& s : trace.samples) {
    if (trace.has_sigma) {
      std::snprintf(buf, sizeof(buf), "%.12e,%.12e,%.12e\n", s.x, s.y,
                    s.sigma_y);
    } else {
      std::snprintf(buf, sizeof(buf), "%.12e,%.12e\n", s.x, s.y);
    }
    out << buf;
  }
}

void write_trace(const std::string& path, const DecayTrace& trace) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  write_trace(out, trace);
}

}  // namespace holeburn::io
