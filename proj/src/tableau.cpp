#include "gark/tableau.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace gark {

using json = nlohmann::json;

namespace {

std::string key_str(int q, int m) { return std::to_string(q) + "," + std::to_string(m); }

void check_finite(const Matrix& M, const std::string& what) {
  if (!M.allFinite()) throw NonFinite("non-finite entry in " + what);
}

void check_block(const BlockMap& blocks, const char* label, int q, int m, int rows, int cols) {
  auto it = blocks.find({q, m});
  if (it == blocks.end())
    throw ShapeMismatch(std::string(label) + " block (" + key_str(q, m) + ") missing");
  if (it->second.rows() != rows || it->second.cols() != cols) {
    std::ostringstream os;
    os << label << " block (" << key_str(q, m) << ") has shape " << it->second.rows() << "x"
       << it->second.cols() << ", expected " << rows << "x" << cols;
    throw ShapeMismatch(os.str());
  }
  check_finite(it->second, std::string(label) + " block (" + key_str(q, m) + ")");
}

void check_weights(const WeightMap& w, const char* label, int m, int len) {
  auto it = w.find(m);
  if (it == w.end()) throw ShapeMismatch(std::string(label) + " weights " + std::to_string(m) + " missing");
  if (it->second.size() != len)
    throw ShapeMismatch(std::string(label) + " weights " + std::to_string(m) + " have length " +
                        std::to_string(it->second.size()) + ", expected " + std::to_string(len));
  check_finite(it->second, std::string(label) + " weights " + std::to_string(m));
}

void check_counts(int N, const std::vector<int>& s, const char* label) {
  if (N < 1) throw ShapeMismatch("N must be at least 1");
  if (static_cast<int>(s.size()) != N)
    throw ShapeMismatch(std::string(label) + " has " + std::to_string(s.size()) + " entries, expected N=" +
                        std::to_string(N));
  for (int v : s)
    if (v < 0) throw ShapeMismatch(std::string(label) + " contains a negative stage count");
}

void check_no_extra(const BlockMap& blocks, int N, const char* label) {
  for (const auto& [k, M] : blocks)
    if (k.first < 1 || k.first > N || k.second < 1 || k.second > N)
      throw ShapeMismatch(std::string(label) + " block (" + key_str(k.first, k.second) + ") out of range");
}

void check_no_extra(const WeightMap& w, int N, const char* label) {
  for (const auto& [k, v] : w)
    if (k < 1 || k > N) throw ShapeMismatch(std::string(label) + " weights " + std::to_string(k) + " out of range");
}

// ---- JSON helpers ----

double json_real(const json& v) {
  if (v.is_number()) {
    double x = v.get<double>();
    if (!std::isfinite(x)) throw NonFinite("non-finite number");
    return x;
  }
  if (v.is_string()) return parse_real(v.get<std::string>());
  throw ParseError("expected a number or a rational string");
}

Vector json_vector(const json& v) {
  if (!v.is_array()) throw ParseError("expected an array of numbers");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = json_real(v[i]);
  return out;
}

// An empty row list carries no column count; the caller fixes it up from s.
Matrix json_matrix(const json& v) {
  if (!v.is_array()) throw ParseError("expected an array of rows");
  if (v.empty()) return Matrix(0, 0);
  std::size_t cols = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_array()) throw ParseError("matrix row is not an array");
    if (i == 0) cols = v[i].size();
    if (v[i].size() != cols) throw ShapeMismatch("ragged matrix rows");
  }
  Matrix M(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j)
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = json_real(v[i][j]);
  return M;
}

int parse_index(const std::string& s) {
  if (s.empty() || s.size() > 6) throw ParseError("bad partition index '" + s + "'");
  for (char ch : s)
    if (ch < '0' || ch > '9') throw ParseError("bad partition index '" + s + "'");
  return std::stoi(s);
}

BlockKey parse_key(const std::string& k) {
  auto comma = k.find(',');
  if (comma == std::string::npos) throw ParseError("block key '" + k + "' is not of the form q,m");
  return {parse_index(k.substr(0, comma)), parse_index(k.substr(comma + 1))};
}

std::vector<int> json_counts(const json& v, const char* label) {
  if (!v.is_array()) throw ParseError(std::string(label) + " must be an array");
  std::vector<int> out;
  for (const auto& e : v) {
    if (!e.is_number_integer()) throw ParseError(std::string(label) + " entries must be integers");
    out.push_back(e.get<int>());
  }
  return out;
}

BlockMap json_blocks(const json& v, const char* label) {
  if (!v.is_object()) throw ParseError(std::string(label) + " must be an object");
  BlockMap out;
  for (auto it = v.begin(); it != v.end(); ++it) out[parse_key(it.key())] = json_matrix(it.value());
  return out;
}

WeightMap json_weights(const json& v, const char* label) {
  if (!v.is_object()) throw ParseError(std::string(label) + " must be an object");
  WeightMap out;
  for (auto it = v.begin(); it != v.end(); ++it) out[parse_index(it.key())] = json_vector(it.value());
  return out;
}

// Empty JSON arrays lose their column count; restore it from the stage counts.
void fix_empty(BlockMap& blocks, const std::vector<int>& rows, const std::vector<int>& cols) {
  for (auto& [k, M] : blocks) {
    if (M.size() != 0) continue;
    int q = k.first, m = k.second;
    if (q < 1 || q > static_cast<int>(rows.size()) || m < 1 || m > static_cast<int>(cols.size())) continue;
    if (M.rows() == 0 && rows[q - 1] == 0) M.resize(0, cols[m - 1]);
  }
}

json matrix_json(const Matrix& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(row);
  }
  return rows;
}

json vector_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json blocks_json(const BlockMap& blocks) {
  json out = json::object();
  for (const auto& [k, M] : blocks) out[key_str(k.first, k.second)] = matrix_json(M);
  return out;
}

json weights_json(const WeightMap& w) {
  json out = json::object();
  for (const auto& [k, v] : w) out[std::to_string(k)] = vector_json(v);
  return out;
}

}  // namespace

int GarkTableau::total_stages() const {
  int n = 0;
  for (int v : s) n += v;
  return n;
}

const Matrix& GarkTableau::block(int q, int m) const {
  auto it = A.find({q, m});
  if (it == A.end()) throw ShapeMismatch("block (" + key_str(q, m) + ") missing");
  return it->second;
}

const Vector& GarkTableau::weights(int m) const {
  auto it = b.find(m);
  if (it == b.end()) throw ShapeMismatch("weights " + std::to_string(m) + " missing");
  return it->second;
}

const Matrix& PartitionedGarkTableau::block(int q, int m) const {
  auto it = A.find({q, m});
  if (it == A.end()) throw ShapeMismatch("A block (" + key_str(q, m) + ") missing");
  return it->second;
}

const Matrix& PartitionedGarkTableau::block_hat(int q, int m) const {
  auto it = A_hat.find({q, m});
  if (it == A_hat.end()) throw ShapeMismatch("A_hat block (" + key_str(q, m) + ") missing");
  return it->second;
}

const Vector& PartitionedGarkTableau::weights(int m) const {
  auto it = b.find(m);
  if (it == b.end()) throw ShapeMismatch("b weights " + std::to_string(m) + " missing");
  return it->second;
}

const Vector& PartitionedGarkTableau::weights_hat(int m) const {
  auto it = b_hat.find(m);
  if (it == b_hat.end()) throw ShapeMismatch("b_hat weights " + std::to_string(m) + " missing");
  return it->second;
}

void ConditionReport::add(std::string id, std::vector<int> indices, double residual) {
  entries.push_back({std::move(id), std::move(indices), residual});
}

void ConditionReport::finalize(double tol) {
  tolerance = tol;
  max_abs_residual = 0.0;
  bool nan = false;
  for (const auto& e : entries) {
    if (std::isnan(e.residual)) nan = true;
    max_abs_residual = std::max(max_abs_residual, std::abs(e.residual));
  }
  verdict = !nan && max_abs_residual <= tol;
}

void validate(const GarkTableau& t) {
  check_counts(t.N, t.s, "s");
  check_no_extra(t.A, t.N, "A");
  check_no_extra(t.b, t.N, "b");
  for (int q = 1; q <= t.N; ++q)
    for (int m = 1; m <= t.N; ++m) check_block(t.A, "A", q, m, t.s[q - 1], t.s[m - 1]);
  for (int m = 1; m <= t.N; ++m) check_weights(t.b, "b", m, t.s[m - 1]);
}

void validate(const PartitionedGarkTableau& t) {
  check_counts(t.N, t.s, "s");
  check_counts(t.N, t.s_hat, "s_hat");
  check_no_extra(t.A, t.N, "A");
  check_no_extra(t.A_hat, t.N, "A_hat");
  check_no_extra(t.b, t.N, "b");
  check_no_extra(t.b_hat, t.N, "b_hat");
  for (int q = 1; q <= t.N; ++q)
    for (int m = 1; m <= t.N; ++m) {
      check_block(t.A, "A", q, m, t.s_hat[q - 1], t.s[m - 1]);
      check_block(t.A_hat, "A_hat", q, m, t.s[q - 1], t.s_hat[m - 1]);
    }
  for (int m = 1; m <= t.N; ++m) {
    check_weights(t.b, "b", m, t.s[m - 1]);
    check_weights(t.b_hat, "b_hat", m, t.s_hat[m - 1]);
  }
}

void validate(const AnyTableau& t) {
  std::visit([](const auto& x) { validate(x); }, t);
}

std::map<BlockKey, Vector> coupling_abscissae(const GarkTableau& t) {
  std::map<BlockKey, Vector> c;
  for (const auto& [k, M] : t.A) c[k] = M.rowwise().sum();
  return c;
}

ConsistencyResult is_internally_consistent(const GarkTableau& t, double tol) {
  auto c = coupling_abscissae(t);
  ConsistencyResult out;
  for (int q = 1; q <= t.N; ++q)
    for (int m = 1; m <= t.N; ++m)
      for (int m2 = m + 1; m2 <= t.N; ++m2) {
        double dev = t.s[q - 1] == 0 ? 0.0 : (c[{q, m}] - c[{q, m2}]).cwiseAbs().maxCoeff();
        out.report.add("intcons", {q, m, m2}, dev);
      }
  out.report.finalize(tol);
  out.consistent = out.report.verdict;
  return out;
}

double parse_real(const std::string& text) {
  auto slash = text.find('/');
  if (slash == std::string::npos) {
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      throw ParseError("bad number '" + text + "'");
    }
    if (used != text.size()) throw ParseError("bad number '" + text + "'");
    if (!std::isfinite(v)) throw NonFinite("non-finite number '" + text + "'");
    return v;
  }
  // Both sides must be integers of magnitude at most 2^53 so they convert
  // exactly; the single IEEE division then rounds to nearest.
  auto parse_int = [&](const std::string& part) -> double {
    std::size_t i = 0;
    bool neg = false;
    if (i < part.size() && (part[i] == '-' || part[i] == '+')) neg = part[i++] == '-';
    if (i == part.size()) throw ParseError("bad rational '" + text + "'");
    std::uint64_t acc = 0;
    for (; i < part.size(); ++i) {
      char ch = part[i];
      if (ch < '0' || ch > '9') throw ParseError("bad rational '" + text + "'");
      acc = acc * 10 + static_cast<std::uint64_t>(ch - '0');
      if (acc > (std::uint64_t{1} << 53)) throw ParseError("rational component too large in '" + text + "'");
    }
    double v = static_cast<double>(acc);
    return neg ? -v : v;
  };
  double p = parse_int(text.substr(0, slash));
  double q = parse_int(text.substr(slash + 1));
  if (q == 0.0) throw ParseError("zero denominator in '" + text + "'");
  return p / q;
}

AnyTableau parse_tableau(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed document: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("tableau document must be an object");
  static const std::set<std::string> known = {"N", "s", "A", "b", "s_hat", "A_hat", "b_hat", "name"};
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (!known.count(it.key())) throw ParseError("unknown key '" + it.key() + "'");
  for (const char* k : {"N", "s", "A", "b"})
    if (!doc.contains(k)) throw ParseError(std::string("missing key '") + k + "'");
  if (!doc["N"].is_number_integer()) throw ParseError("N must be an integer");

  int hats = static_cast<int>(doc.contains("s_hat")) + static_cast<int>(doc.contains("A_hat")) +
             static_cast<int>(doc.contains("b_hat"));
  if (hats != 0 && hats != 3) throw ParseError("s_hat, A_hat and b_hat must be given together");

  std::string name;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw ParseError("name must be a string");
    name = doc["name"].get<std::string>();
  }

  if (hats == 0) {
    GarkTableau t;
    t.N = doc["N"].get<int>();
    t.s = json_counts(doc["s"], "s");
    t.A = json_blocks(doc["A"], "A");
    t.b = json_weights(doc["b"], "b");
    t.name = name;
    fix_empty(t.A, t.s, t.s);
    validate(t);
    return t;
  }
  PartitionedGarkTableau t;
  t.N = doc["N"].get<int>();
  t.s = json_counts(doc["s"], "s");
  t.s_hat = json_counts(doc["s_hat"], "s_hat");
  t.A = json_blocks(doc["A"], "A");
  t.A_hat = json_blocks(doc["A_hat"], "A_hat");
  t.b = json_weights(doc["b"], "b");
  t.b_hat = json_weights(doc["b_hat"], "b_hat");
  t.name = name;
  fix_empty(t.A, t.s_hat, t.s);
  fix_empty(t.A_hat, t.s, t.s_hat);
  validate(t);
  return t;
}

AnyTableau read_tableau(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_tableau(ss.str());
}

std::string serialize_tableau(const AnyTableau& any) {
  json doc = json::object();
  std::visit(
      [&](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if (!t.name.empty()) doc["name"] = t.name;
        doc["N"] = t.N;
        doc["s"] = t.s;
        doc["A"] = blocks_json(t.A);
        doc["b"] = weights_json(t.b);
        if constexpr (std::is_same_v<T, PartitionedGarkTableau>) {
          doc["s_hat"] = t.s_hat;
          doc["A_hat"] = blocks_json(t.A_hat);
          doc["b_hat"] = weights_json(t.b_hat);
        }
      },
      any);
  return doc.dump(2) + "\n";
}

void write_tableau(const AnyTableau& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << serialize_tableau(t);
  if (!out) throw ParseError("write to '" + path + "' failed");
}

PartitionedGarkTableau as_partitioned(const GarkTableau& t) {
  PartitionedGarkTableau p;
  p.N = t.N;
  p.s = t.s;
  p.s_hat = t.s;
  p.A = t.A;
  p.A_hat = t.A;
  p.b = t.b;
  p.b_hat = t.b;
  p.name = t.name;
  return p;
}

Matrix reversal(int n) {
  Matrix P = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) P(i, n - 1 - i) = 1.0;
  return P;
}

}  // namespace gark
