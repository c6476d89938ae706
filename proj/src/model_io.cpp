#include "feedrank/model_io.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "feedrank/error.hpp"
#include "feedrank/format.hpp"

namespace feedrank {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, end);
}

double parse_double(std::string_view text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double value = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size())
    throw DataError("bad number '" + std::string(text) + "'");
  return value;
}

const std::string* ModelFile::header_value(const std::string& key) const {
  for (const auto& [k, v] : header)
    if (k == key) return &v;
  return nullptr;
}

void ModelFile::set_header(const std::string& key, std::string value) {
  for (auto& [k, v] : header)
    if (k == key) {
      v = std::move(value);
      return;
    }
  header.emplace_back(key, std::move(value));
}

namespace {

std::string format_limit(std::int64_t v) { return v == kUnbounded ? "inf" : std::to_string(v); }

std::int64_t parse_limit(const std::string& token) {
  if (token == "inf") return kUnbounded;
  std::int64_t v = 0;
  auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || end != token.data() + token.size())
    throw DataError("bad bin limit '" + token + "'");
  return v;
}

template <typename Range>
void write_reals(std::ostream& out, const Range& values) {
  bool first = true;
  for (double v : values) {
    out << (first ? "" : " ") << format_double(v);
    first = false;
  }
  out << '\n';
}

void write_matrix(std::ostream& out, const char* name, const Matrix& m) {
  out << '[' << name << "]\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(m.row(i).begin(), m.row(i).end());
    write_reals(out, row);
  }
}

std::vector<std::string> split(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string token; in >> token;) out.push_back(token);
  return out;
}

std::vector<double> parse_reals(const std::string& text) {
  std::vector<double> out;
  for (const auto& t : split(text)) out.push_back(parse_double(t));
  return out;
}

Matrix parse_matrix(const std::vector<std::string>& lines, const char* name) {
  const auto n = static_cast<Eigen::Index>(lines.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto row = parse_reals(lines[static_cast<std::size_t>(i)]);
    if (static_cast<Eigen::Index>(row.size()) != n)
      throw DataError(std::string("model section [") + name + "] is not square");
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = row[static_cast<std::size_t>(j)];
  }
  return m;
}

std::pair<std::string, std::string> key_value(const std::string& line) {
  const auto eq = line.find('=');
  if (eq == std::string::npos) throw DataError("expected 'key = value' in model file: " + line);
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t");
    const auto b = s.find_last_not_of(" \t");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  return {trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
}

}  // namespace

void write_model(std::ostream& out, const ModelFile& file) {
  out << "# feedrank model v1\n";
  out << "[header]\n";
  for (const auto& [k, v] : file.header) out << k << " = " << v << '\n';

  out << "[bins]\nnovelty_limits =";
  for (auto v : file.bins.novelty_limits) out << ' ' << format_limit(v);
  out << "\npopularity_limits =";
  for (auto v : file.bins.popularity_limits) out << ' ' << format_limit(v);
  out << '\n';

  out << "[rewards]\nnovelty = ";
  write_reals(out, file.factors.novelty);
  out << "popularity = ";
  write_reals(out, file.factors.popularity);

  out << "[model]\nbeta = " << format_double(file.model.beta) << "\nepsilon = ";
  std::vector<double> eps(file.model.epsilon.begin(), file.model.epsilon.end());
  write_reals(out, eps);
  write_matrix(out, "p1", file.model.p1);
  write_matrix(out, "p0", file.model.p0);

  if (file.indices) {
    const auto& t = *file.indices;
    out << "[indices]\n# rank state g y\n";
    for (std::size_t k = 0; k < t.order.size(); ++k)
      out << k + 1 << ' ' << t.order[k] << ' ' << format_double(t.g[static_cast<std::size_t>(t.order[k])])
          << ' ' << format_double(t.y[k]) << '\n';
  }
}

ModelFile read_model(std::istream& in) {
  std::map<std::string, std::vector<std::string>> sections;
  std::vector<std::string> order;
  std::string current;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[' && line.back() == ']') {
      current = line.substr(1, line.size() - 2);
      if (sections.contains(current)) throw DataError("duplicate model section [" + current + "]");
      sections[current];
      continue;
    }
    if (current.empty()) throw DataError("model file content before the first section");
    sections[current].push_back(line);
  }
  for (const char* required : {"header", "bins", "rewards", "model", "p1", "p0"})
    if (!sections.contains(required))
      throw DataError(std::string("model file lacks section [") + required + "]");

  ModelFile file;
  for (const auto& l : sections["header"]) file.header.push_back(key_value(l));

  std::map<std::string, std::string> kv;
  for (const char* s : {"bins", "rewards", "model"})
    for (const auto& l : sections[s]) kv.insert(key_value(l));
  auto need = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw DataError(std::string("model file lacks '") + key + "'");
    return it->second;
  };

  file.bins.novelty_limits.clear();
  for (const auto& t : split(need("novelty_limits"))) file.bins.novelty_limits.push_back(parse_limit(t));
  for (const auto& t : split(need("popularity_limits")))
    file.bins.popularity_limits.push_back(parse_limit(t));
  try {
    file.bins.validate();
  } catch (const ConfigError& e) {
    throw DataError(std::string("model file bins: ") + e.what());
  }
  file.factors.novelty = parse_reals(need("novelty"));
  file.factors.popularity = parse_reals(need("popularity"));

  file.model.beta = parse_double(need("beta"));
  const auto eps = parse_reals(need("epsilon"));
  file.model.epsilon = Eigen::Map<const Vector>(eps.data(), static_cast<Eigen::Index>(eps.size()));
  file.model.p1 = parse_matrix(sections["p1"], "p1");
  file.model.p0 = parse_matrix(sections["p0"], "p0");
  if (file.model.size() != file.bins.state_count())
    throw DataError("model matrices do not match the bins");
  try {
    file.model.validate();
  } catch (const Error& e) {
    throw DataError(std::string("model file: ") + e.what());
  }

  if (sections.contains("indices")) {
    IndexTable t;
    const auto n = static_cast<std::size_t>(file.model.size());
    t.g.assign(n, 0.0);
    std::vector<bool> seen(n, false);
    for (const auto& l : sections["indices"]) {
      const auto tok = split(l);
      if (tok.size() != 4) throw DataError("bad index line: " + l);
      const auto state = static_cast<StateId>(parse_limit(tok[1]));
      if (state < 0 || static_cast<std::size_t>(state) >= n || seen[static_cast<std::size_t>(state)])
        throw DataError("bad state in index line: " + l);
      seen[static_cast<std::size_t>(state)] = true;
      t.order.push_back(state);
      t.g[static_cast<std::size_t>(state)] = parse_double(tok[2]);
      t.y.push_back(parse_double(tok[3]));
    }
    if (t.order.size() != n) throw DataError("index table does not cover every state");
    file.indices = std::move(t);
  }
  return file;
}

void write_rank_grid(std::ostream& out, const IndexTable& table, const BinSpec& bins) {
  std::vector<std::size_t> rank(table.g.size());
  for (std::size_t k = 0; k < table.order.size(); ++k)
    rank[static_cast<std::size_t>(table.order[k])] = k + 1;

  out << "extraction rank by state (rows: popularity, high to low; columns: novelty)\n";
  out << "     ";
  for (int n = 1; n <= bins.novelty_bins(); ++n) out << std::setw(5) << ("n" + std::to_string(n));
  out << '\n';
  for (int p = bins.popularity_bins(); p >= 1; --p) {
    out << std::setw(5) << ("p" + std::to_string(p));
    for (int n = 1; n <= bins.novelty_bins(); ++n)
      out << std::setw(5) << rank[static_cast<std::size_t>(state_of({n, p}, bins))];
    out << '\n';
  }
  out << "state 0: rank " << rank[kUnknownState] << '\n';
}

}  // namespace feedrank
