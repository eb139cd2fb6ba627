// Learn a reach from one demonstration, then replay it toward a new goal,
// slower, and around an obstacle.

#include <cstdio>

#include "dmp/dmp.hpp"

int main() {
  using namespace dmp;
  const VectorXd start = VectorXd::Zero(2);
  const VectorXd goal = (VectorXd(2) << 1.0, 0.5).finished();
  const Demonstration<VectorXd> demo = min_jerk_demo(start, goal, 1.0, 0.01);

  TrainOptions train;
  train.kernels = 20;
  DiscreteDmp dmp = train_discrete(demo, train);

  RolloutOptions o;
  o.duration = 1.5;
  const auto plain = rollout(dmp, o);
  std::printf("reproduced: end (%.4f, %.4f)\n", plain.samples.back()[0], plain.samples.back()[1]);

  dmp.goal = (VectorXd(2) << 0.5, 1.0).finished();
  const auto moved = rollout(dmp, o);
  std::printf("new goal:   end (%.4f, %.4f)\n", moved.samples.back()[0], moved.samples.back()[1]);

  DiscreteDmp slow = dmp;
  slow.gains.tau *= 2.0;
  o.duration = 3.0;
  const auto slower = rollout(slow, o);
  std::printf("tau x2:     %zu samples over %.2f s\n", slower.size(), slower.duration());

  o.coupling = obstacle_hook(ObstacleField{(VectorXd(2) << 0.3, 0.45).finished(), 200.0, 1.0, 0.3});
  const auto avoided = rollout(dmp, o);
  const double miss = (avoided.samples.back() - dmp.goal).norm();
  std::printf("obstacle:   end error %.2e\n", miss);

  const double err = (moved.samples.back() - dmp.goal).norm();
  return err < 1e-2 && miss < 1e-2 ? 0 : 1;
}
