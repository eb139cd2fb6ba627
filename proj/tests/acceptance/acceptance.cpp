// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmp/dmp.hpp"
#include "support/properties.hpp"

namespace fs = std::filesystem;
using namespace dmp;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("[%s] %2d %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  if (!ok) ++failures;
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

void sub(const std::string& name, bool ok, const std::string& detail, bool& all) {
  std::printf("       %-4s %s: %s\n", ok ? "ok" : "FAIL", name.c_str(), detail.c_str());
  all = all && ok;
}

std::string read_all(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

template <class Fn>
void guarded(int id, const std::string& name, Fn fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    report(id, name, false, std::string("exception: ") + e.what());
  }
}

}  // namespace

int main() {
  guarded(1, "Fig. 2 discrete reaching", [] {
    const auto m = scenarios::fig2().metrics;
    report(1, "Fig. 2 discrete reaching", m.at("rmse") < 1e-2 && m.at("end_error") < 1e-3,
           fmt("rmse %.3g (< 1e-2), |y(T)-g| %.3g (< 1e-3)", m.at("rmse"), m.at("end_error")));
  });
  guarded(2, "Fig. 4 quaternion DMP", [] {
    const auto m = scenarios::fig4().metrics;
    report(2, "Fig. 4 quaternion DMP", m.at("max_norm_error") < 1e-9 && m.at("terminal_distance") < 1e-2,
           fmt("max | |q|-1 | %.3g (< 1e-9), terminal distance %.3g rad (< 1e-2)", m.at("max_norm_error"),
               m.at("terminal_distance")));
  });
  guarded(3, "Fig. 5 rotation-matrix DMP", [] {
    const auto m = scenarios::fig5().metrics;
    report(3, "Fig. 5 rotation-matrix DMP",
           m.at("max_orthogonality_error") < 1e-9 && m.at("max_det_error") < 1e-9 && m.at("terminal_distance") < 1e-2,
           fmt("max |R^T R - I| %.3g, max |det R - 1| %.3g (< 1e-9), terminal %.3g rad (< 1e-2)",
               m.at("max_orthogonality_error"), m.at("max_det_error"), m.at("terminal_distance")));
  });
  guarded(4, "Fig. 7 SPD DMP", [] {
    const auto m = scenarios::fig7().metrics;
    report(4, "Fig. 7 SPD DMP", m.at("min_eigenvalue") > 0.0 && m.at("terminal_distance") < 1e-2,
           fmt("min eigenvalue %.3g (> 0), terminal distance %.3g (< 1e-2)", m.at("min_eigenvalue"),
               m.at("terminal_distance")));
  });
  guarded(5, "Fig. 6 periodic DMP", [] {
    const auto m = scenarios::fig6().metrics;
    report(5, "Fig. 6 periodic DMP", m.at("steady_rmse") < 5e-2,
           fmt("steady-state rmse %.3g (< 5e-2)", m.at("steady_rmse")));
  });
  guarded(6, "Fig. 8 velocity-threshold joining", [] {
    const auto m = scenarios::fig8().metrics;
    const double sw = m.at("switch_time"), total = m.at("total_duration");
    report(6, "Fig. 8 velocity-threshold joining", std::abs(sw - 4.7) <= 0.2 && std::abs(total - 9.5) <= 0.3,
           fmt("switch %.3f s (4.7 +- 0.2), total %.3f s (9.5 +- 0.3)", sw, total));
  });
  guarded(7, "Fig. 9 target-crossing joining", [] {
    const auto m = scenarios::fig9().metrics;
    const double tc = m.at("crossing_time"), ve = m.at("crossing_velocity_error"), total = m.at("total_duration");
    report(7, "Fig. 9 target-crossing joining",
           std::abs(tc - 5.0) <= 0.05 && ve < 1e-3 && std::abs(total - 10.0) <= 0.05,
           fmt("crossed at %.3f s (5.0 +- 0.05), velocity error %.3g (< 1e-3), total %.3f s (10.0 +- 0.05)", tc, ve,
               total));
  });
  guarded(8, "Fig. 10 basis-function overlay", [] {
    const auto m = scenarios::fig10().metrics;
    const double bound = 2.0 * m.at("demo_max_acceleration") * 0.01;
    const bool ok = m.at("kernels") == 40.0 && m.at("junction_velocity_jump") < bound &&
                    m.at("total_duration") > m.at("nominal_duration");
    report(8, "Fig. 10 basis-function overlay", ok,
           fmt("kernels %.0f (= 40), junction jump %.3g (< %.3g), total %.3f s", m.at("kernels"),
               m.at("junction_velocity_jump"), bound, m.at("total_duration")) +
               fmt(" (> %.1f s)", m.at("nominal_duration")));
  });
  guarded(9, "Property suite", [] {
    bool all = true;
    const double rls = props::batch_vs_recursive();
    sub("batch = recursive fit, lambda = 1", rls < 1e-6, fmt("rel. err %.3g (< 1e-6)", rls), all);
    const double rt = props::manifold_roundtrip();
    sub("Exp/Log roundtrips on S^3, SO(3), S++", rt < 1e-8, fmt("max err %.3g (< 1e-8)", rt), all);
    const double ph = props::phase_closed_form();
    sub("phase closed form at dt = 1e-3", ph < 1e-4, fmt("max err %.3g (< 1e-4)", ph), all);
    const double si = props::scale_invariance();
    sub("scale-invariant amplitude equivariance", si < 1e-6, fmt("max err %.3g (< 1e-6)", si), all);
    const double sp = props::speed_reparameterization();
    sub("speed scaling time reparameterization", sp < 1e-4, fmt("max err %.3g (< 1e-4)", sp), all);
    const int cn = props::coupling_neutrality();
    sub("coupling neutrality", cn == 0, fmt("%.0f differing samples (exact)", cn), all);
    const double gs = props::goal_switch_closed_form();
    sub("goal switching closed form", gs < 1e-6, fmt("max err %.3g (< 1e-6)", gs), all);
    const auto loo = props::gesture_leave_one_out();
    sub("gesture corpus leave-one-out", loo.correct == loo.total,
        fmt("%.0f/%.0f correct (100%%)", loo.correct, loo.total), all);
    report(9, "Property suite", all, all ? "all properties hold" : "see failing properties above");
  });
  guarded(10, "Determinism of demo-figures", [] {
    const fs::path root = fs::temp_directory_path() / "dmp_acceptance_determinism";
    fs::remove_all(root);
    std::size_t files = 0, mismatched = 0;
    // Separate processes of the command-line tool, one per target and run.
    for (const auto& name : scenarios::figure_names()) {
      for (const char* run : {"a", "b"}) {
        const std::string cmd = std::string("\"") + DMPCLI_PATH + "\" demo-figures --which " + name + " --out \"" +
                                (root / run).string() + "\"";
        if (std::system(cmd.c_str()) != 0) throw std::runtime_error("command failed: " + cmd);
      }
    }
    for (const auto& entry : fs::directory_iterator(root / "a")) {
      ++files;
      const fs::path other = root / "b" / entry.path().filename();
      if (!fs::exists(other) || read_all(entry.path()) != read_all(other)) ++mismatched;
    }
    std::size_t files_b = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(root / "b")) ++files_b;
    fs::remove_all(root);
    report(10, "Determinism of demo-figures", files > 0 && mismatched == 0 && files == files_b,
           fmt("%.0f files per run, %.0f differ", static_cast<double>(files), static_cast<double>(mismatched)));
  });

  std::printf("%s: %d of 10 criteria failed\n", failures ? "FAILED" : "PASSED", failures);
  return failures ? 1 : 0;
}
