#include "tubesolv/field.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tubesolv {

void FourierField::validate() const {
  if (data.rows() != grid.n || data.cols() != box.size())
    throw std::invalid_argument("FourierField: data shape does not match grid/box");
  if (!data.allFinite()) throw std::invalid_argument("FourierField: non-finite entry");
}

namespace {

std::string g17(Real v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string header_line(const char* kind, const FourierField& f) {
  std::ostringstream os;
  os << "tubefield v1 " << kind << " nt=" << f.grid.n << " dim=" << f.box.N << " K=" << g17(f.box.K);
  return os.str();
}

struct Header {
  std::string kind;
  int nt = 0, dim = 0;
  Real K = 0;
};

Header parse_header(std::string line) {
  if (line.rfind("# ", 0) == 0) line.erase(0, 2);  // CSV comment form
  std::istringstream is(line);
  std::string magic, version;
  Header h;
  is >> magic >> version >> h.kind;
  if (magic != "tubefield" || version != "v1")
    throw std::runtime_error("field file: malformed or missing header: " + line);
  std::string kv;
  while (is >> kv) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
    if (key == "nt") h.nt = std::stoi(val);
    else if (key == "dim") h.dim = std::stoi(val);
    else if (key == "K") h.K = std::stod(val);
  }
  if (h.nt <= 0 || h.dim <= 0 || !(h.K > 0))
    throw std::runtime_error("field file: malformed or missing header: " + line);
  return h;
}

} // namespace

void write_field_csv(const std::string& path, const FourierField& f) {
  f.validate();
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << "# " << header_line("csv", f) << "\n";
  for (int i = 0; i < f.box.size(); ++i)
    for (int j = 0; j < f.grid.n; ++j) {
      os << j;
      for (int d = 0; d < f.box.N; ++d) os << "," << f.box[i][d];
      os << "," << g17(f.data(j, i).real()) << "," << g17(f.data(j, i).imag()) << "\n";
    }
  if (!os) throw std::runtime_error("write failed: " + path);
}

void write_field_binary(const std::string& path, const FourierField& f) {
  f.validate();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << header_line("bin", f) << "\n";
  auto put = [&os](Real v) {
    char buf[8];
    std::memcpy(buf, &v, 8);
    os.write(buf, 8);
  };
  for (int i = 0; i < f.box.size(); ++i)
    for (int j = 0; j < f.grid.n; ++j) {
      put(Real(j));
      for (int d = 0; d < f.box.N; ++d) put(Real(f.box[i][d]));
      put(f.data(j, i).real());
      put(f.data(j, i).imag());
    }
  if (!os) throw std::runtime_error("write failed: " + path);
}

FourierField read_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(is, line);
  const Header h = parse_header(line);
  FourierField f(CircleGrid(h.nt), FrequencyBox(h.dim, h.K));
  const long records = long(h.nt) * f.box.size();
  Freq xi(h.dim);

  if (h.kind == "csv") {
    long seen = 0;
    while (std::getline(is, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      std::string cell;
      auto next = [&]() -> Real {
        if (!std::getline(ls, cell, ',')) throw std::runtime_error(path + ": truncated row: " + line);
        return std::stod(cell);
      };
      const int j = int(next());
      for (int d = 0; d < h.dim; ++d) xi[d] = int(next());
      const Real re = next(), im = next();
      const int i = f.box.index_of(xi);
      if (i < 0) throw std::runtime_error(path + ": frequency outside the declared box: " + freq_to_string(xi));
      if (j < 0 || j >= h.nt) throw std::runtime_error(path + ": node index out of range");
      f.data(j, i) = Complex(re, im);
      ++seen;
    }
    if (seen != records)
      throw std::runtime_error(path + ": expected " + std::to_string(records) + " records, found " +
                               std::to_string(seen));
  } else if (h.kind == "bin") {
    auto get = [&is, &path]() {
      char buf[8];
      is.read(buf, 8);
      if (!is) throw std::runtime_error(path + ": truncated binary payload");
      Real v;
      std::memcpy(&v, buf, 8);
      return v;
    };
    for (long rec = 0; rec < records; ++rec) {
      const int j = int(get());
      for (int d = 0; d < h.dim; ++d) xi[d] = int(get());
      const Real re = get(), im = get();
      const int i = f.box.index_of(xi);
      if (i < 0) throw std::runtime_error(path + ": frequency outside the declared box");
      if (j < 0 || j >= h.nt) throw std::runtime_error(path + ": node index out of range");
      f.data(j, i) = Complex(re, im);
    }
  } else {
    throw std::runtime_error(path + ": unknown field format '" + h.kind + "'");
  }
  f.validate();
  return f;
}

} // namespace tubesolv
