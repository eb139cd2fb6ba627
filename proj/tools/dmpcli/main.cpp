// dmpcli: train, roll out, join and classify movement primitives from the shell.
//
// Exit codes: 0 success, 2 invalid input, 3 numerical failure.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dmp/dmp.hpp"

namespace fs = std::filesystem;
using namespace dmp;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

std::vector<double> parse_numbers(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string tok = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    try {
      out.push_back(detail::parse_double(tok, 0));
    } catch (const ParseError&) {
      throw InvalidArgument(what + ": '" + tok + "' is not a number");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class Point>
Point parse_point(const std::vector<double>& v, const std::string& what) {
  try {
    if constexpr (std::is_same_v<Point, UnitQuaternion>) {
      if (v.size() != 4) throw InvalidArgument(what + " needs 4 numbers (qw,qx,qy,qz)");
    } else if constexpr (std::is_same_v<Point, SpdMatrix>) {
      const auto m = static_cast<Eigen::Index>(std::llround((std::sqrt(8.0 * static_cast<double>(v.size()) + 1) - 1) / 2));
      if (v.empty() || static_cast<std::size_t>(m * (m + 1) / 2) != v.size()) {
        throw InvalidArgument(what + " needs m(m+1)/2 Mandel components");
      }
    }
    return detail::csv_point<Point>(v, 0);
  } catch (const ParseError& e) {
    throw InvalidArgument(what + ": " + e.what());
  }
}

Variant parse_variant(const std::string& s) {
  if (s == "classical") return Variant::Classical;
  if (s == "scale") return Variant::ScaleInvariant;
  if (s == "pastor") return Variant::Pastor;
  if (s == "crossing") return Variant::TargetCrossing;
  throw InvalidArgument("unknown variant '" + s + "'");
}

PhaseConfig parse_phase(const std::string& s) {
  if (s == "exp") return ExponentialPhase{};
  if (s == "sigmoid") return SigmoidalPhase{};
  if (s == "linear") return PiecewiseLinearPhase{};
  throw InvalidArgument("unknown phase '" + s + "'");
}

Integrator parse_integrator(const std::string& s) {
  if (s == "euler") return Integrator::SemiImplicitEuler;
  if (s == "rk4") return Integrator::RungeKutta4;
  throw InvalidArgument("unknown integrator '" + s + "'");
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string type = "discrete";
  std::string input;
  std::string out;
  int kernels = 20;
  std::string variant = "classical";
  std::string phase = "exp";
  double alpha_z = 25.0;
  double beta_z = 6.25;
  std::optional<double> time_scale;
  bool delayed_goal = false;
  std::optional<double> omega;
  std::optional<double> ridge;
  std::string label;
  std::string query;
};

void run_train(const TrainArgs& a) {
  TrainOptions o;
  o.kernels = a.kernels;
  o.variant = parse_variant(a.variant);
  o.phase = parse_phase(a.phase);
  o.alpha_z = a.alpha_z;
  o.beta_z = a.beta_z;
  o.time_scale = a.time_scale;
  o.delayed_goal = a.delayed_goal;
  o.ridge = a.ridge;

  DmpModel m;
  m.label = a.label;
  if (!a.query.empty()) {
    const auto q = parse_numbers(a.query, "--query");
    m.query = Eigen::Map<const VectorXd>(q.data(), static_cast<Eigen::Index>(q.size()));
  }
  if (a.type == "discrete") {
    m.dmp = train_discrete(parse_trajectory_file<VectorXd>(a.input), o);
  } else if (a.type == "periodic") {
    const auto demo = parse_trajectory_file<VectorXd>(a.input);
    PeriodicTrainOptions po;
    po.kernels = a.kernels;
    po.alpha = a.alpha_z;
    po.beta = a.beta_z;
    po.ridge = a.ridge;
    // Without --omega the demo is taken to span exactly one period.
    m.dmp = train_periodic(demo, a.omega ? *a.omega : 2.0 * kPi / demo.duration(), po);
  } else if (a.type == "quaternion") {
    m.dmp = train_quaternion(parse_trajectory_file<UnitQuaternion>(a.input), o);
  } else if (a.type == "rotation") {
    m.dmp = train_rotation(parse_trajectory_file<Rotation3>(a.input), o);
  } else if (a.type == "spd") {
    m.dmp = train_spd(parse_trajectory_file<SpdMatrix>(a.input), o);
  } else {
    throw InvalidArgument("unknown type '" + a.type + "'");
  }
  save_model_file(a.out, m);
}

// ---------------------------------------------------------------------------
// rollout
// ---------------------------------------------------------------------------

struct RolloutArgs {
  std::string model;
  std::string out;
  double dt = 0.01;
  std::optional<double> duration;
  std::string integrator = "euler";
  std::string goal;
  std::optional<double> tau;
  std::string goal_switch;
  double alpha_g = 10.0;
  std::string speed_profile;
  std::string obstacle;
  double obstacle_gain = 100.0;
};

/// CSV with header "c,h,v" (phase-indexed kernels) or "s,sigma,v" (time-indexed kernels).
SpeedProfile load_speed_profile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  std::string s;
  std::size_t line = 0;
  SpeedProfile p;
  std::vector<double> c, h, v;
  bool header = false;
  while (std::getline(in, s)) {
    ++line;
    if (s.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = detail::split_csv(s);
    if (!header) {
      if (cells == std::vector<std::string>{"c", "h", "v"}) {
        p.layout.kind = KernelKind::GaussianPhase;
      } else if (cells == std::vector<std::string>{"s", "sigma", "v"}) {
        p.layout.kind = KernelKind::GaussianTime;
      } else {
        throw ParseError("speed profile header must be 'c,h,v' or 's,sigma,v'", line);
      }
      header = true;
      continue;
    }
    if (cells.size() != 3) throw ParseError("expected 3 columns", line);
    c.push_back(detail::parse_double(cells[0], line));
    h.push_back(detail::parse_double(cells[1], line));
    v.push_back(detail::parse_double(cells[2], line));
  }
  if (!header) throw ParseError("missing header row", line + 1);
  const auto n = static_cast<Eigen::Index>(c.size());
  p.layout.centers = Eigen::Map<const VectorXd>(c.data(), n);
  p.layout.widths = Eigen::Map<const VectorXd>(h.data(), n);
  p.values = Eigen::Map<const VectorXd>(v.data(), n);
  p.validate();
  return p;
}

template <class Point>
std::optional<GoalSwitch<Point>> goal_switch_from(const RolloutArgs& a) {
  if (a.goal_switch.empty()) return std::nullopt;
  auto v = parse_numbers(a.goal_switch, "--goal-switch");
  if (v.size() < 2) throw InvalidArgument("--goal-switch needs t,g...");
  GoalSwitch<Point> gs{v.front(), parse_point<Point>({v.begin() + 1, v.end()}, "--goal-switch goal"), a.alpha_g};
  return gs;
}

template <class Options>
void common_rollout_options(Options& o, const RolloutArgs& a) {
  o.dt = a.dt;
  o.duration = a.duration;
  o.integrator = parse_integrator(a.integrator);
}

void reject_discrete_only(const RolloutArgs& a, const char* formulation) {
  if (!a.speed_profile.empty() || !a.obstacle.empty()) {
    throw InvalidArgument(std::string("--speed-profile and --obstacle apply to discrete models, not ") + formulation);
  }
}

template <class Point, class Dmp>
void geometric_rollout(Dmp dmp, const RolloutArgs& a, const char* name) {
  reject_discrete_only(a, name);
  if (!a.goal.empty()) dmp.goal = parse_point<Point>(parse_numbers(a.goal, "--goal"), "--goal");
  if (a.tau) dmp.gains.tau = *a.tau;
  BasicRolloutOptions<decltype(initial_state(dmp)), Point> o;
  common_rollout_options(o, a);
  o.goal_switch = goal_switch_from<Point>(a);
  write_trajectory_file(a.out, rollout(dmp, o), true);
}

void run_rollout(const RolloutArgs& a) {
  const DmpModel m = load_model_file(a.model);
  if (const auto* d = std::get_if<DiscreteDmp>(&m.dmp)) {
    DiscreteDmp dmp = *d;
    if (!a.goal.empty()) dmp.goal = parse_point<VectorXd>(parse_numbers(a.goal, "--goal"), "--goal");
    if (a.tau) dmp.gains.tau = *a.tau;
    RolloutOptions o;
    common_rollout_options(o, a);
    o.goal_switch = goal_switch_from<VectorXd>(a);
    std::vector<CouplingHook> hooks;
    if (!a.speed_profile.empty()) hooks.push_back(speed_hook(load_speed_profile(a.speed_profile)));
    if (!a.obstacle.empty()) {
      const auto v = parse_numbers(a.obstacle, "--obstacle");
      const auto j = static_cast<std::size_t>(dmp.dofs());
      if (v.size() != j + 2) throw InvalidArgument("--obstacle needs the obstacle position, r0 and zeta");
      ObstacleField field;
      field.center = Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(j));
      field.radius = v[j];
      field.zeta = v[j + 1];
      field.gain = a.obstacle_gain;
      hooks.push_back(obstacle_hook(field));
    }
    if (!hooks.empty()) {
      o.coupling = [hooks](double t, const DiscreteState& s) {
        Coupling c;
        for (const auto& h : hooks) c = combine(c, h(t, s));
        return c;
      };
    }
    write_trajectory_file(a.out, rollout(dmp, o), true);
  } else if (const auto* p = std::get_if<PeriodicDmp>(&m.dmp)) {
    reject_discrete_only(a, "periodic");
    if (!a.goal_switch.empty()) throw InvalidArgument("--goal-switch applies to point attractors");
    PeriodicDmp dmp = *p;
    if (!a.goal.empty()) dmp.anchor = parse_point<VectorXd>(parse_numbers(a.goal, "--goal"), "--goal");
    if (a.tau) dmp.omega = 1.0 / *a.tau;
    PeriodicRolloutOptions o;
    o.dt = a.dt;
    // Default: three periods.
    o.duration = a.duration ? *a.duration : 3.0 * 2.0 * kPi / dmp.omega;
    write_trajectory_file(a.out, rollout(dmp, o), true);
  } else if (const auto* q = std::get_if<QuaternionDmp>(&m.dmp)) {
    geometric_rollout<UnitQuaternion>(*q, a, "quaternion");
  } else if (const auto* r = std::get_if<RotationDmp>(&m.dmp)) {
    geometric_rollout<Rotation3>(*r, a, "rotation");
  } else {
    geometric_rollout<SpdMatrix>(std::get<SpdDmp>(m.dmp), a, "spd");
  }
}

// ---------------------------------------------------------------------------
// join
// ---------------------------------------------------------------------------

struct JoinArgs {
  std::string method;
  std::vector<std::string> models;
  std::string out;
  std::string out_model;
  std::optional<double> threshold;
  std::string criterion = "distance";
  std::string cross_vel;
  double dt = 0.01;
  std::string integrator = "rk4";
};

/// "pos.dmp", "ori.dmp" or "pos.dmp,ori.dmp".
PoseDmp load_pose(const std::string& segment) {
  PoseDmp p;
  std::size_t start = 0;
  while (start <= segment.size()) {
    const std::size_t comma = segment.find(',', start);
    const std::string file = segment.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    DmpModel m = load_model_file(file);
    if (auto* d = std::get_if<DiscreteDmp>(&m.dmp)) {
      if (p.position) throw InvalidArgument(segment + ": two position models in one segment");
      p.position = std::move(*d);
    } else if (auto* q = std::get_if<QuaternionDmp>(&m.dmp)) {
      if (p.orientation) throw InvalidArgument(segment + ": two orientation models in one segment");
      p.orientation = std::move(*q);
    } else {
      throw InvalidArgument(file + ": joining takes discrete position or quaternion models");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return p;
}

fs::path with_suffix(const fs::path& path, const std::string& suffix) {
  return path.parent_path() / (path.stem().string() + suffix + path.extension().string());
}

void write_pose(const fs::path& out, const PoseTrajectory& t) {
  if (!t.position.empty()) write_trajectory_file(out, t.position, true);
  if (!t.orientation.empty()) {
    write_trajectory_file(t.position.empty() ? out : with_suffix(out, "_orientation"), t.orientation, true);
  }
  std::ofstream sw(with_suffix(out, "_switches").replace_extension(".txt"), std::ios::binary);
  for (double s : t.switch_times) sw << detail::format_double(s) << '\n';
}

void run_join(const JoinArgs& a) {
  DmpSequence seq;
  for (const auto& m : a.models) seq.segments.push_back(load_pose(m));
  JoinOptions jo;
  jo.dt = a.dt;
  jo.integrator = parse_integrator(a.integrator);
  if (a.method == "threshold") {
    SwitchThresholds th;
    if (a.criterion == "speed") {
      th.criterion = SwitchCriterion::Speed;
    } else if (a.criterion != "distance") {
      throw InvalidArgument("unknown criterion '" + a.criterion + "'");
    }
    if (a.threshold) th.position = th.orientation = *a.threshold;
    write_pose(a.out, join_velocity_threshold(seq, th, jo));
  } else if (a.method == "crossing") {
    std::vector<CrossingVelocity> vel;
    if (!a.cross_vel.empty()) {
      const double v = parse_numbers(a.cross_vel, "--cross-vel").at(0);
      const auto& first = seq.segments.front();
      for (std::size_t l = 0; l + 1 < seq.size(); ++l) {
        CrossingVelocity c;
        if (first.position) c.position = VectorXd::Constant(first.position->dofs(), v);
        if (first.orientation) c.orientation = VectorXd::Constant(3, v);
        vel.push_back(std::move(c));
      }
    }
    write_pose(a.out, join_target_crossing(seq, vel, jo));
  } else if (a.method == "overlay") {
    const PoseDmp joined = join_overlay(seq);
    PoseRolloutOptions ro;
    ro.dt = a.dt;
    ro.integrator = jo.integrator;
    write_pose(a.out, rollout(joined, ro));
    if (!a.out_model.empty()) {
      const fs::path path = a.out_model;
      if (joined.position) save_model_file(path, {*joined.position, "joined", {}});
      if (joined.orientation) {
        save_model_file(joined.position ? with_suffix(path, "_orientation") : path,
                        {*joined.orientation, "joined", {}});
      }
    }
  } else {
    throw InvalidArgument("unknown join method '" + a.method + "'");
  }
}

// ---------------------------------------------------------------------------
// classify, library, demo data
// ---------------------------------------------------------------------------

void run_classify(const std::string& library, const std::string& query) {
  const ModelLibrary lib = load_library(library);
  const Classification c = classify(lib, parse_trajectory_file<VectorXd>(query));
  std::cout << c.label << ' ' << detail::format_double(c.score) << '\n';
}

void run_library(const std::string& out, const std::vector<std::string>& models) {
  ModelLibrary lib;
  for (const auto& f : models) lib.entries.push_back(load_model_file(f));
  save_library(out, lib);
}

void run_figures(const std::string& which, const std::string& out, std::uint64_t seed) {
  if (which == "all") {
    for (const auto& name : scenarios::figure_names()) scenarios::export_figure(name, out, seed);
  } else {
    scenarios::export_figure(which, out, seed);
  }
}

/// Gesture corpus as CSV files plus a library trained on all of it.
void run_gestures(const std::string& out, std::uint64_t seed, int reps) {
  const fs::path dir = out;
  fs::create_directories(dir);
  const auto corpus = scenarios::gesture_corpus(reps, seed);
  ModelLibrary lib;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& g = corpus[i];
    std::ostringstream name;
    name << g.label << '_' << i << ".csv";
    write_trajectory_file(dir / name.str(), g.demo);
    lib.entries.push_back({train_discrete(g.demo, scenarios::gesture_train_options()), g.label, {}});
  }
  save_library(dir / "library", lib);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic movement primitives: train, roll out, join and classify."};
  app.require_subcommand(1);

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Fit a primitive to a demonstration CSV");
  train->add_option("--type", ta.type, "discrete|periodic|quaternion|rotation|spd")->capture_default_str();
  train->add_option("--input", ta.input, "Demonstration CSV")->required();
  train->add_option("--n", ta.kernels, "Number of kernels")->capture_default_str();
  train->add_option("--variant", ta.variant, "classical|scale|pastor|crossing")->capture_default_str();
  train->add_option("--phase", ta.phase, "exp|sigmoid|linear")->capture_default_str();
  train->add_option("--alpha-z", ta.alpha_z, "Damping gain")->capture_default_str();
  train->add_option("--beta-z", ta.beta_z, "Stiffness gain")->capture_default_str();
  train->add_option("--time-scale", ta.time_scale, "Fix tau (sigmoid and linear phases only)");
  train->add_flag("--delayed-goal", ta.delayed_goal, "Train against a goal ramp from start to goal");
  train->add_option("--omega", ta.omega, "Periodic frequency [rad/s]; default: the demo is one period");
  train->add_option("--ridge", ta.ridge, "Ridge regularization");
  train->add_option("--label", ta.label, "Label stored with the model");
  train->add_option("--query", ta.query, "Task parameters q1,q2,... stored with the model");
  train->add_option("--out", ta.out, "Output model file")->required();

  RolloutArgs ra;
  auto* roll = app.add_subcommand("rollout", "Integrate a trained primitive");
  roll->add_option("--model", ra.model, "Model file")->required();
  roll->add_option("--dt", ra.dt, "Step [s]")->capture_default_str();
  roll->add_option("--duration", ra.duration, "Run time [s]; default: until the phase decays");
  roll->add_option("--integrator", ra.integrator, "euler|rk4")->capture_default_str();
  roll->add_option("--goal", ra.goal, "New goal, comma separated (Mandel components for SPD)");
  roll->add_option("--tau", ra.tau, "Temporal scaling");
  roll->add_option("--goal-switch", ra.goal_switch, "t,g... switch the goal at time t");
  roll->add_option("--alpha-g", ra.alpha_g, "Goal switching rate")->capture_default_str();
  roll->add_option("--speed-profile", ra.speed_profile, "CSV with header c,h,v or s,sigma,v");
  roll->add_option("--obstacle", ra.obstacle, "Obstacle position then r0,zeta, e.g. x,y,z,r0,zeta");
  roll->add_option("--obstacle-gain", ra.obstacle_gain, "Obstacle gain")->capture_default_str();
  roll->add_option("--out", ra.out, "Output trajectory CSV")->required();

  JoinArgs ja;
  auto* join = app.add_subcommand("join", "Chain primitives into one motion");
  join->add_option("--method", ja.method, "threshold|crossing|overlay")->required();
  join->add_option("models", ja.models, "Segments: pos.dmp, ori.dmp or pos.dmp,ori.dmp")->required()->expected(2, -1);
  join->add_option("--threshold", ja.threshold, "Switch threshold [m or rad], default 0.01");
  join->add_option("--criterion", ja.criterion, "distance|speed")->capture_default_str();
  join->add_option("--cross-vel", ja.cross_vel, "Crossing velocity per axis");
  join->add_option("--dt", ja.dt, "Step [s]")->capture_default_str();
  join->add_option("--integrator", ja.integrator, "euler|rk4")->capture_default_str();
  join->add_option("--out", ja.out, "Output trajectory CSV")->required();
  join->add_option("--out-model", ja.out_model, "Joined model file (overlay only)");

  std::string lib_dir, query;
  auto* cls = app.add_subcommand("classify", "Recognize a demonstration against a model library");
  cls->add_option("--library", lib_dir, "Library directory")->required();
  cls->add_option("--query", query, "Demonstration CSV")->required();

  std::string lib_out;
  std::vector<std::string> lib_models;
  auto* lib = app.add_subcommand("library", "Bundle labelled models into a library directory");
  lib->add_option("--out", lib_out, "Library directory")->required();
  lib->add_option("models", lib_models, "Model files")->required();

  std::string which, fig_out;
  std::uint64_t seed = 7;
  auto* figs = app.add_subcommand("demo-figures", "Regenerate the data behind each figure");
  figs->add_option("--which", which, "fig2|fig4|fig5|fig6|fig7|fig8|fig9|fig10|all")->required();
  figs->add_option("--out", fig_out, "Output directory")->required();
  figs->add_option("--seed", seed, "Noise seed")->capture_default_str();

  std::string gest_out;
  std::uint64_t gest_seed = 11;
  int reps = 5;
  auto* gest = app.add_subcommand("demo-gestures", "Write the synthetic gesture corpus and its library");
  gest->add_option("--out", gest_out, "Output directory")->required();
  gest->add_option("--seed", gest_seed, "Noise seed")->capture_default_str();
  gest->add_option("--reps", reps, "Repetitions per class")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*train) run_train(ta);
    if (*roll) run_rollout(ra);
    if (*join) run_join(ja);
    if (*cls) run_classify(lib_dir, query);
    if (*lib) run_library(lib_out, lib_models);
    if (*figs) run_figures(which, fig_out, seed);
    if (*gest) run_gestures(gest_out, gest_seed, reps);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
