#pragma once

// Text formats. Models use a line-oriented, versioned format; trajectories are
// CSV with a header row. Numbers are written in the shortest form that reads
// back to the same double, so save/load is bit-exact.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <vector>

#include "dmp/errors.hpp"
#include "dmp/library.hpp"
#include "dmp/model.hpp"
#include "dmp/trajectory.hpp"

namespace dmp {

inline constexpr int kModelFormatVersion = 1;

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  if (r.ec != std::errc()) throw InvalidArgument("cannot format number");
  return std::string(buf, r.ptr);
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

inline double parse_double(std::string_view tok, std::size_t line) {
  double v = 0.0;
  const char* begin = tok.data();
  const char* end = tok.data() + tok.size();
  if (begin != end && *begin == '+') ++begin;
  const auto r = std::from_chars(begin, end, v);
  if (r.ec != std::errc() || r.ptr != end) throw ParseError("not a number: '" + std::string(tok) + "'", line);
  return v;
}

inline long parse_int(std::string_view tok, std::size_t line) {
  long v = 0;
  const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (r.ec != std::errc() || r.ptr != tok.data() + tok.size()) {
    throw ParseError("not an integer: '" + std::string(tok) + "'", line);
  }
  return v;
}

// ---- point <-> numbers ----

inline std::vector<double> point_numbers(const VectorXd& p) { return {p.data(), p.data() + p.size()}; }
inline std::vector<double> point_numbers(const UnitQuaternion& q) { return {q.nu(), q.u().x(), q.u().y(), q.u().z()}; }
inline std::vector<double> point_numbers(const Rotation3& r) {
  std::vector<double> v;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) v.push_back(r.matrix()(i, j));
  return v;
}
inline std::vector<double> point_numbers(const SpdMatrix& x) {
  const MatrixXd& m = x.matrix();
  std::vector<double> v;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) v.push_back(m(i, j));
  return v;
}

template <class Point>
Point point_from(const std::vector<double>& v, std::size_t line);

template <>
inline VectorXd point_from<VectorXd>(const std::vector<double>& v, std::size_t) {
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}
template <>
inline UnitQuaternion point_from<UnitQuaternion>(const std::vector<double>& v, std::size_t line) {
  if (v.size() != 4) throw ParseError("quaternion needs 4 numbers", line);
  return UnitQuaternion(v[0], v[1], v[2], v[3]);
}
template <>
inline Rotation3 point_from<Rotation3>(const std::vector<double>& v, std::size_t line) {
  if (v.size() != 9) throw ParseError("rotation needs 9 numbers", line);
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = v[static_cast<std::size_t>(3 * i + j)];
  return Rotation3(m);
}
template <>
inline SpdMatrix point_from<SpdMatrix>(const std::vector<double>& v, std::size_t line) {
  const auto m = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (m < 1 || static_cast<std::size_t>(m * m) != v.size()) throw ParseError("SPD matrix needs m*m numbers", line);
  MatrixXd x(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) x(i, j) = v[static_cast<std::size_t>(i * m + j)];
  return SpdMatrix(x);
}

// ---- writer ----

class ModelWriter {
 public:
  explicit ModelWriter(std::ostream& out) : out_(out) {}

  void key(const std::string& k) { out_ << k; }
  void num(double v) { out_ << ' ' << format_double(v); }
  void word(const std::string& w) { out_ << ' ' << w; }
  void end() { out_ << '\n'; }

  void line(const std::string& k, std::initializer_list<double> v) {
    key(k);
    for (double x : v) num(x);
    end();
  }
  void counted(const std::string& k, const std::vector<double>& v) {
    key(k);
    out_ << ' ' << v.size();
    for (double x : v) num(x);
    end();
  }
  template <class Point>
  void point(const std::string& k, const Point& p) {
    counted(k, point_numbers(p));
  }
  void vec(const std::string& k, const VectorXd& v) { counted(k, point_numbers(v)); }

 private:
  std::ostream& out_;
};

// ---- reader ----

class ModelReader {
 public:
  explicit ModelReader(std::istream& in) : in_(in) {}

  std::size_t line() const { return line_; }

  /// Next non-empty, non-comment line split into tokens.
  std::vector<std::string> next() {
    std::vector<std::string> toks;
    if (!try_next(toks)) throw ParseError("unexpected end of file", line_ + 1);
    return toks;
  }

  /// False at end of input.
  bool try_next(std::vector<std::string>& toks) {
    std::string s;
    while (std::getline(in_, s)) {
      ++line_;
      if (!s.empty() && s.back() == '\r') s.pop_back();
      raw_ = s;
      toks = split_ws(s);
      if (toks.empty() || toks.front().front() == '#') continue;
      return true;
    }
    return false;
  }

  const std::string& raw() const { return raw_; }

  std::vector<std::string> expect(const std::string& k) {
    auto t = next();
    if (t.front() != k) throw ParseError("expected '" + k + "', found '" + t.front() + "'", line_);
    return t;
  }

  std::vector<double> numbers(const std::vector<std::string>& t, std::size_t from) const {
    std::vector<double> v;
    for (std::size_t i = from; i < t.size(); ++i) v.push_back(parse_double(t[i], line_));
    return v;
  }

  std::vector<double> fixed(const std::string& k, std::size_t n) {
    auto t = expect(k);
    if (t.size() != n + 1) throw ParseError("'" + k + "' needs " + std::to_string(n) + " values", line_);
    return numbers(t, 1);
  }

  std::vector<double> counted(const std::string& k) {
    auto t = expect(k);
    return counted_from(t, 1);
  }

  std::vector<double> counted_from(const std::vector<std::string>& t, std::size_t at) {
    if (t.size() <= at) throw ParseError("missing count", line_);
    const long n = parse_int(t[at], line_);
    if (n < 0 || static_cast<std::size_t>(n) != t.size() - at - 1) throw ParseError("value count mismatch", line_);
    return numbers(t, at + 1);
  }

  VectorXd vec(const std::string& k) { return point_from<VectorXd>(counted(k), line_); }

  template <class Point>
  Point point(const std::string& k) {
    try {
      return point_from<Point>(counted(k), line_);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.what(), line_);
    }
  }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
  std::string raw_;
};

// ---- shared sections ----

inline void write_gains_phase(ModelWriter& w, const Gains& g, const PhaseConfig& p) {
  w.line("gains", {g.alpha_z, g.beta_z, g.tau});
  w.key("phase");
  if (const auto* e = std::get_if<ExponentialPhase>(&p)) {
    w.word("exponential");
    w.num(e->alpha_x);
  } else if (const auto* s = std::get_if<SigmoidalPhase>(&p)) {
    w.word("sigmoidal");
    w.num(s->alpha_s);
    w.num(s->sample_time);
    w.num(s->T);
  } else if (const auto* l = std::get_if<PiecewiseLinearPhase>(&p)) {
    w.word("linear");
    w.num(l->T);
  } else {
    w.word("periodic");
  }
  w.end();
}

inline void read_gains_phase(ModelReader& r, Gains& g, PhaseConfig& p) {
  const auto gv = r.fixed("gains", 3);
  g = {gv[0], gv[1], gv[2]};
  auto t = r.expect("phase");
  if (t.size() < 2) throw ParseError("phase kind missing", r.line());
  const auto v = r.numbers(t, 2);
  auto need = [&](std::size_t n) {
    if (v.size() != n) throw ParseError("phase '" + t[1] + "' needs " + std::to_string(n) + " values", r.line());
  };
  if (t[1] == "exponential") {
    need(1);
    p = ExponentialPhase{v[0]};
  } else if (t[1] == "sigmoidal") {
    need(3);
    p = SigmoidalPhase{v[0], v[1], v[2]};
  } else if (t[1] == "linear") {
    need(1);
    p = PiecewiseLinearPhase{v[0]};
  } else if (t[1] == "periodic") {
    need(0);
    p = PeriodicPhase{};
  } else {
    throw ParseError("unknown phase '" + t[1] + "'", r.line());
  }
}

inline const char* variant_name(Variant v) {
  switch (v) {
    case Variant::Classical: return "classical";
    case Variant::ScaleInvariant: return "scale-invariant";
    case Variant::Pastor: return "pastor";
    case Variant::TargetCrossing: return "target-crossing";
  }
  return "classical";
}

inline Variant variant_from(const std::string& s, std::size_t line) {
  if (s == "classical") return Variant::Classical;
  if (s == "scale-invariant") return Variant::ScaleInvariant;
  if (s == "pastor") return Variant::Pastor;
  if (s == "target-crossing") return Variant::TargetCrossing;
  throw ParseError("unknown variant '" + s + "'", line);
}

inline void write_forcing(ModelWriter& w, const ForcingModel& f) {
  static constexpr const char* kinds[] = {"gaussian-phase", "gaussian-time", "von-mises"};
  w.key("kernels");
  w.word(kinds[static_cast<int>(f.layout.kind)]);
  w.word(std::to_string(f.layout.size()));
  w.num(f.amplitude);
  w.end();
  w.vec("centers", f.layout.centers);
  w.vec("widths", f.layout.widths);
  w.key("weights");
  w.word(std::to_string(f.weights.rows()));
  w.word(std::to_string(f.weights.cols()));
  w.end();
  for (Eigen::Index i = 0; i < f.weights.rows(); ++i) {
    w.key("w");
    for (Eigen::Index j = 0; j < f.weights.cols(); ++j) w.num(f.weights(i, j));
    w.end();
  }
}

inline ForcingModel read_forcing(ModelReader& r) {
  ForcingModel f;
  auto t = r.expect("kernels");
  if (t.size() != 4) throw ParseError("'kernels' needs kind, count and amplitude", r.line());
  if (t[1] == "gaussian-phase") {
    f.layout.kind = KernelKind::GaussianPhase;
  } else if (t[1] == "gaussian-time") {
    f.layout.kind = KernelKind::GaussianTime;
  } else if (t[1] == "von-mises") {
    f.layout.kind = KernelKind::VonMises;
  } else {
    throw ParseError("unknown kernel kind '" + t[1] + "'", r.line());
  }
  const long n = parse_int(t[2], r.line());
  f.amplitude = parse_double(t[3], r.line());
  f.layout.centers = r.vec("centers");
  f.layout.widths = r.vec("widths");
  if (f.layout.centers.size() != n || f.layout.widths.size() != n) throw ParseError("kernel count mismatch", r.line());
  auto wt = r.expect("weights");
  if (wt.size() != 3) throw ParseError("'weights' needs rows and columns", r.line());
  const long rows = parse_int(wt[1], r.line());
  const long cols = parse_int(wt[2], r.line());
  if (rows != n || cols < 1) throw ParseError("weight matrix shape mismatch", r.line());
  f.weights.resize(rows, cols);
  for (long i = 0; i < rows; ++i) {
    const auto v = r.fixed("w", static_cast<std::size_t>(cols));
    for (long j = 0; j < cols; ++j) f.weights(i, j) = v[static_cast<std::size_t>(j)];
  }
  return f;
}

template <class Point>
void write_delayed_goal(ModelWriter& w, const std::optional<DelayedGoal<Point>>& dg) {
  w.key("delayed-goal");
  w.word(dg ? std::to_string(dg->goals.size()) : "0");
  w.end();
  if (!dg) return;
  w.point("leg-start", dg->start);
  for (std::size_t l = 0; l < dg->goals.size(); ++l) {
    std::vector<double> v{dg->durations[l]};
    const auto p = point_numbers(dg->goals[l]);
    v.insert(v.end(), p.begin(), p.end());
    w.counted("leg", v);
  }
}

template <class Point>
std::optional<DelayedGoal<Point>> read_delayed_goal(ModelReader& r) {
  auto t = r.expect("delayed-goal");
  if (t.size() != 2) throw ParseError("'delayed-goal' needs a leg count", r.line());
  const long n = parse_int(t[1], r.line());
  if (n < 0) throw ParseError("negative leg count", r.line());
  if (n == 0) return std::nullopt;
  DelayedGoal<Point> dg;
  dg.start = r.point<Point>("leg-start");
  for (long l = 0; l < n; ++l) {
    const auto v = r.counted("leg");
    if (v.empty()) throw ParseError("leg needs a duration", r.line());
    dg.durations.push_back(v.front());
    try {
      dg.goals.push_back(point_from<Point>(std::vector<double>(v.begin() + 1, v.end()), r.line()));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.what(), r.line());
    }
  }
  return dg;
}

// ---- per formulation ----

inline void write_body(ModelWriter& w, const DiscreteDmp& d) {
  write_gains_phase(w, d.gains, d.phase);
  w.key("variant");
  w.word(variant_name(d.variant));
  w.end();
  w.point("start", d.y0);
  w.point("goal", d.goal);
  w.vec("crossing", d.crossing_velocity);
  write_delayed_goal(w, d.delayed_goal);
  w.key("via");
  w.word(d.via ? std::to_string(d.via->goals.size()) : "0");
  w.end();
  if (d.via) {
    for (std::size_t v = 0; v < d.via->goals.size(); ++v) {
      std::vector<double> row{d.via->centers[static_cast<Eigen::Index>(v)],
                              d.via->widths[static_cast<Eigen::Index>(v)]};
      const auto p = point_numbers(d.via->goals[v]);
      row.insert(row.end(), p.begin(), p.end());
      w.counted("via-goal", row);
    }
  }
  write_forcing(w, d.forcing);
}

inline DiscreteDmp read_discrete(ModelReader& r) {
  DiscreteDmp d;
  read_gains_phase(r, d.gains, d.phase);
  auto vt = r.expect("variant");
  if (vt.size() != 2) throw ParseError("'variant' needs a name", r.line());
  d.variant = variant_from(vt[1], r.line());
  d.y0 = r.vec("start");
  d.goal = r.vec("goal");
  d.crossing_velocity = r.vec("crossing");
  d.delayed_goal = read_delayed_goal<VectorXd>(r);
  auto via = r.expect("via");
  if (via.size() != 2) throw ParseError("'via' needs a count", r.line());
  const long nv = parse_int(via[1], r.line());
  if (nv < 0) throw ParseError("negative via count", r.line());
  if (nv > 0) {
    ViaGoalSchedule s;
    s.centers.resize(nv);
    s.widths.resize(nv);
    for (long v = 0; v < nv; ++v) {
      const auto row = r.counted("via-goal");
      if (row.size() < 3) throw ParseError("via goal needs center, width and a point", r.line());
      s.centers[v] = row[0];
      s.widths[v] = row[1];
      s.goals.push_back(point_from<VectorXd>(std::vector<double>(row.begin() + 2, row.end()), r.line()));
    }
    d.via = std::move(s);
  }
  d.forcing = read_forcing(r);
  return d;
}

inline void write_body(ModelWriter& w, const PeriodicDmp& d) {
  w.line("rhythm", {d.alpha, d.beta, d.omega});
  w.point("anchor", d.anchor);
  w.point("start", d.y0);
  write_forcing(w, d.forcing);
}

inline PeriodicDmp read_periodic(ModelReader& r) {
  PeriodicDmp d;
  const auto v = r.fixed("rhythm", 3);
  d.alpha = v[0];
  d.beta = v[1];
  d.omega = v[2];
  d.anchor = r.vec("anchor");
  d.y0 = r.vec("start");
  d.forcing = read_forcing(r);
  return d;
}

inline void write_body(ModelWriter& w, const QuaternionDmp& d) {
  write_gains_phase(w, d.gains, d.phase);
  w.key("variant");
  w.word(variant_name(d.variant));
  w.end();
  w.point("start", d.q0);
  w.point("goal", d.goal);
  w.vec("crossing", d.crossing_velocity);
  write_delayed_goal(w, d.delayed_goal);
  write_forcing(w, d.forcing);
}

inline QuaternionDmp read_quaternion(ModelReader& r) {
  QuaternionDmp d;
  read_gains_phase(r, d.gains, d.phase);
  auto vt = r.expect("variant");
  if (vt.size() != 2) throw ParseError("'variant' needs a name", r.line());
  d.variant = variant_from(vt[1], r.line());
  d.q0 = r.point<UnitQuaternion>("start");
  d.goal = r.point<UnitQuaternion>("goal");
  d.crossing_velocity = r.vec("crossing");
  d.delayed_goal = read_delayed_goal<UnitQuaternion>(r);
  d.forcing = read_forcing(r);
  return d;
}

inline void write_body(ModelWriter& w, const RotationDmp& d) {
  write_gains_phase(w, d.gains, d.phase);
  w.point("start", d.r0);
  w.point("goal", d.goal);
  write_forcing(w, d.forcing);
}

inline RotationDmp read_rotation(ModelReader& r) {
  RotationDmp d;
  read_gains_phase(r, d.gains, d.phase);
  d.r0 = r.point<Rotation3>("start");
  d.goal = r.point<Rotation3>("goal");
  d.forcing = read_forcing(r);
  return d;
}

inline void write_body(ModelWriter& w, const SpdDmp& d) {
  write_gains_phase(w, d.gains, d.phase);
  w.point("start", d.x1);
  w.point("goal", d.goal);
  write_forcing(w, d.forcing);
}

inline SpdDmp read_spd(ModelReader& r) {
  SpdDmp d;
  read_gains_phase(r, d.gains, d.phase);
  d.x1 = r.point<SpdMatrix>("start");
  d.goal = r.point<SpdMatrix>("goal");
  d.forcing = read_forcing(r);
  return d;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

inline void save_model(std::ostream& out, const DmpModel& m) {
  m.validate();
  if (m.label.find('\n') != std::string::npos) throw InvalidArgument("label must be a single line");
  detail::ModelWriter w(out);
  w.key("dmp-model");
  w.word(std::to_string(kModelFormatVersion));
  w.end();
  w.key("formulation");
  w.word(formulation_name(m.dmp));
  w.end();
  out << "label " << m.label << '\n';
  w.vec("query", m.query);
  std::visit([&](const auto& d) { detail::write_body(w, d); }, m.dmp);
  out << "end\n";
  if (!out) throw InvalidArgument("failed to write model");
}

inline std::string to_string(const DmpModel& m) {
  std::ostringstream s;
  save_model(s, m);
  return s.str();
}

inline DmpModel load_model(std::istream& in) {
  detail::ModelReader r(in);
  auto head = r.expect("dmp-model");
  if (head.size() != 2) throw ParseError("missing format version", r.line());
  if (detail::parse_int(head[1], r.line()) != kModelFormatVersion) {
    throw ParseError("unsupported format version " + head[1], r.line());
  }
  auto ft = r.expect("formulation");
  if (ft.size() != 2) throw ParseError("'formulation' needs a name", r.line());
  DmpModel m;
  r.expect("label");
  {
    const std::string& raw = r.raw();
    const auto pos = raw.find("label");
    m.label = pos + 6 <= raw.size() ? raw.substr(pos + 6) : std::string();
  }
  m.query = r.vec("query");
  const std::size_t body_line = r.line();
  try {
    if (ft[1] == "discrete") {
      m.dmp = detail::read_discrete(r);
    } else if (ft[1] == "periodic") {
      m.dmp = detail::read_periodic(r);
    } else if (ft[1] == "quaternion") {
      m.dmp = detail::read_quaternion(r);
    } else if (ft[1] == "rotation") {
      m.dmp = detail::read_rotation(r);
    } else if (ft[1] == "spd") {
      m.dmp = detail::read_spd(r);
    } else {
      throw ParseError("unknown formulation '" + ft[1] + "'", body_line);
    }
    r.expect("end");
    m.validate();
  } catch (const ParseError&) {
    throw;
  } catch (const InputError& e) {
    throw ParseError(e.what(), r.line());
  }
  return m;
}

inline DmpModel model_from_string(const std::string& s) {
  std::istringstream in(s);
  return load_model(in);
}

inline void save_model_file(const std::filesystem::path& path, const DmpModel& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open " + path.string() + " for writing");
  save_model(out, m);
}

inline DmpModel load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  return load_model(in);
}

// ---------------------------------------------------------------------------
// Trajectories (CSV)
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> sample_columns(const VectorXd& p) {
  std::vector<std::string> c;
  for (Eigen::Index i = 0; i < p.size(); ++i) c.push_back("y" + std::to_string(i + 1));
  return c;
}
inline std::vector<std::string> sample_columns(const UnitQuaternion&) { return {"qw", "qx", "qy", "qz"}; }
inline std::vector<std::string> sample_columns(const Rotation3&) {
  std::vector<std::string> c;
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) c.push_back("r" + std::to_string(i) + std::to_string(j));
  return c;
}
inline std::vector<std::string> sample_columns(const SpdMatrix& x) {
  std::vector<std::string> c;
  for (Eigen::Index i = 0; i < mandel_size(x.dim()); ++i) c.push_back("m" + std::to_string(i + 1));
  return c;
}

inline std::vector<double> csv_values(const VectorXd& p) { return point_numbers(p); }
inline std::vector<double> csv_values(const UnitQuaternion& q) { return point_numbers(q); }
inline std::vector<double> csv_values(const Rotation3& r) { return point_numbers(r); }
inline std::vector<double> csv_values(const SpdMatrix& x) {
  const VectorXd v = mandel_vec(x.matrix());
  return {v.data(), v.data() + v.size()};
}

inline std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != ' ' && ch != '\t' && ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

template <class Point>
bool column_matches(const std::string& name, std::size_t index);

template <>
inline bool column_matches<VectorXd>(const std::string& name, std::size_t index) {
  return name == "y" + std::to_string(index + 1);
}
template <>
inline bool column_matches<UnitQuaternion>(const std::string& name, std::size_t index) {
  static const char* n[] = {"qw", "qx", "qy", "qz"};
  return index < 4 && name == n[index];
}
template <>
inline bool column_matches<Rotation3>(const std::string& name, std::size_t index) {
  return index < 9 && name == "r" + std::to_string(index / 3 + 1) + std::to_string(index % 3 + 1);
}
template <>
inline bool column_matches<SpdMatrix>(const std::string& name, std::size_t index) {
  return name == "m" + std::to_string(index + 1);
}

template <class Point>
Point csv_point(const std::vector<double>& v, std::size_t line) {
  if constexpr (std::is_same_v<Point, VectorXd>) {
    return point_from<VectorXd>(v, line);
  } else if constexpr (std::is_same_v<Point, UnitQuaternion>) {
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]);
    if (!(std::abs(n - 1.0) < 1e-6)) {
      throw InvariantViolation("line " + std::to_string(line) + ": quaternion norm " + format_double(n));
    }
    return UnitQuaternion(v[0], v[1], v[2], v[3]);
  } else if constexpr (std::is_same_v<Point, Rotation3>) {
    try {
      return point_from<Rotation3>(v, line);
    } catch (const InvariantViolation& e) {
      throw InvariantViolation("line " + std::to_string(line) + ": " + e.what());
    }
  } else {
    const Eigen::Index k = static_cast<Eigen::Index>(v.size());
    try {
      return SpdMatrix(mandel_mat(Eigen::Map<const VectorXd>(v.data(), k)));
    } catch (const NotSpd& e) {
      throw InvariantViolation("line " + std::to_string(line) + ": " + e.what());
    }
  }
}

}  // namespace detail

/// Writes t and the sample columns; with `derivatives`, also v1.. and a1.. when present.
template <class Point>
void write_trajectory(std::ostream& out, const Trajectory<Point>& traj, bool derivatives = false) {
  if (traj.empty()) throw InvalidArgument("empty trajectory");
  const bool with_d = derivatives && traj.has_derivatives();
  std::vector<std::string> cols{"t"};
  for (auto& c : detail::sample_columns(traj.samples.front())) cols.push_back(c);
  if (with_d) {
    for (Eigen::Index i = 0; i < traj.velocity.cols(); ++i) cols.push_back("v" + std::to_string(i + 1));
    for (Eigen::Index i = 0; i < traj.acceleration.cols(); ++i) cols.push_back("a" + std::to_string(i + 1));
  }
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out << detail::format_double(traj.times[k]);
    for (double v : detail::csv_values(traj.samples[k])) out << ',' << detail::format_double(v);
    if (with_d) {
      const auto r = static_cast<Eigen::Index>(k);
      for (Eigen::Index i = 0; i < traj.velocity.cols(); ++i) out << ',' << detail::format_double(traj.velocity(r, i));
      for (Eigen::Index i = 0; i < traj.acceleration.cols(); ++i) {
        out << ',' << detail::format_double(traj.acceleration(r, i));
      }
    }
    out << '\n';
  }
  if (!out) throw InvalidArgument("failed to write trajectory");
}

/// Reads a CSV written by write_trajectory (or by hand). Times must increase strictly.
template <class Point>
Trajectory<Point> parse_trajectory(std::istream& in) {
  std::string s;
  std::size_t line = 0;
  std::vector<std::string> header;
  while (std::getline(in, s)) {
    ++line;
    if (s.find_first_not_of(" \t\r") == std::string::npos || s[s.find_first_not_of(" \t")] == '#') continue;
    header = detail::split_csv(s);
    break;
  }
  if (header.empty()) throw ParseError("missing header row", line + 1);
  if (header.front() != "t") throw ParseError("first column must be 't'", line);
  std::size_t n_sample = 0;
  while (1 + n_sample < header.size() && detail::column_matches<Point>(header[1 + n_sample], n_sample)) ++n_sample;
  if (n_sample == 0) throw ParseError("no sample columns recognized in header", line);
  std::size_t n_vel = 0, n_acc = 0;
  std::size_t c = 1 + n_sample;
  while (c < header.size() && header[c] == "v" + std::to_string(n_vel + 1)) ++n_vel, ++c;
  while (c < header.size() && header[c] == "a" + std::to_string(n_acc + 1)) ++n_acc, ++c;
  if (c != header.size()) throw ParseError("unrecognized column '" + header[c] + "'", line);
  if (n_vel != n_acc) throw ParseError("velocity and acceleration column counts differ", line);

  Trajectory<Point> traj;
  std::vector<std::vector<double>> vel, acc;
  while (std::getline(in, s)) {
    ++line;
    if (s.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = detail::split_csv(s);
    if (cells.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " columns, found " + std::to_string(cells.size()),
                       line);
    }
    std::vector<double> v;
    for (const auto& cell : cells) v.push_back(detail::parse_double(cell, line));
    if (!std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); })) {
      throw ParseError("non-finite value", line);
    }
    if (!traj.times.empty() && !(v[0] > traj.times.back())) throw ParseError("time must increase strictly", line);
    traj.times.push_back(v[0]);
    traj.samples.push_back(detail::csv_point<Point>(std::vector<double>(v.begin() + 1, v.begin() + 1 + n_sample), line));
    if (n_vel) {
      vel.emplace_back(v.begin() + 1 + n_sample, v.begin() + 1 + n_sample + n_vel);
      acc.emplace_back(v.begin() + 1 + n_sample + n_vel, v.end());
    }
  }
  if (traj.times.empty()) throw ParseError("no data rows", line + 1);
  if (n_vel) {
    const auto rows = static_cast<Eigen::Index>(vel.size());
    traj.velocity.resize(rows, static_cast<Eigen::Index>(n_vel));
    traj.acceleration.resize(rows, static_cast<Eigen::Index>(n_vel));
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(n_vel); ++j) {
        traj.velocity(i, j) = vel[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        traj.acceleration(i, j) = acc[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      }
    }
  }
  return traj;
}

template <class Point>
void write_trajectory_file(const std::filesystem::path& path, const Trajectory<Point>& traj, bool derivatives = false) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open " + path.string() + " for writing");
  write_trajectory(out, traj, derivatives);
}

template <class Point>
Trajectory<Point> parse_trajectory_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  return parse_trajectory<Point>(in);
}

// ---------------------------------------------------------------------------
// Library directory: index.txt plus one model file per entry
// ---------------------------------------------------------------------------

/// index.txt lines: "entry <file> <label> <K> q1 .. qK".
inline void save_library(const std::filesystem::path& dir, const ModelLibrary& lib) {
  lib.validate();
  std::filesystem::create_directories(dir);
  std::ofstream index(dir / "index.txt", std::ios::binary);
  if (!index) throw InvalidArgument("cannot write library index in " + dir.string());
  index << "dmp-library 1\n";
  for (std::size_t i = 0; i < lib.entries.size(); ++i) {
    const DmpModel& m = lib.entries[i];
    if (m.label.empty() || m.label.find_first_of(" \t\n") != std::string::npos) {
      throw InvalidArgument("library labels must be non-empty words");
    }
    const std::string file = "model_" + std::to_string(i) + ".dmp";
    save_model_file(dir / file, m);
    index << "entry " << file << ' ' << m.label << ' ' << m.query.size();
    for (Eigen::Index k = 0; k < m.query.size(); ++k) index << ' ' << detail::format_double(m.query[k]);
    index << '\n';
  }
}

inline ModelLibrary load_library(const std::filesystem::path& dir) {
  std::ifstream in(dir / "index.txt", std::ios::binary);
  if (!in) throw InvalidArgument("no library index in " + dir.string());
  detail::ModelReader r(in);
  auto head = r.expect("dmp-library");
  if (head.size() != 2 || head[1] != "1") throw ParseError("unsupported library index version", r.line());
  ModelLibrary lib;
  for (std::vector<std::string> t; r.try_next(t);) {
    if (t.front() != "entry" || t.size() < 4) throw ParseError("malformed library entry", r.line());
    DmpModel m = load_model_file(dir / t[1]);
    m.label = t[2];
    m.query = detail::point_from<VectorXd>(r.counted_from(t, 3), r.line());
    lib.entries.push_back(std::move(m));
  }
  lib.validate();
  return lib;
}

}  // namespace dmp
