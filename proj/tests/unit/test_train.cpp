#include <gtest/gtest.h>

#include "dapip/train.hpp"
#include "tiny_model.hpp"

namespace dapip {
namespace {

using testing::tiny_inputs;
using testing::tiny_instance;

std::vector<TrainingInstance> tiny_data() {
  return {
      tiny_instance("(Concat inp)", tiny_inputs()),
      tiny_instance("(Concat (GetFirstWord (arg inp)))", tiny_inputs()),
      tiny_instance("(Concat (GetLastWord (arg inp)) (ConstStr DOT))", tiny_inputs()),
      tiny_instance("(Concat (ToUppercase (arg (GetFirstWord (arg inp)))))", tiny_inputs()),
      tiny_instance("(Concat (GetFirstWord (arg inp)) (ConstStr SPACE) (GetLastWord (arg inp)))", tiny_inputs()),
  };
}

std::vector<double> flat_params(const R3nnModel& m) {
  std::vector<double> out;
  for (std::size_t i = 0; i < m.params().size(); ++i) {
    const auto d = m.params()[i].value.data();
    out.insert(out.end(), d.begin(), d.end());
  }
  return out;
}

TEST(Train, EpochReportsAndCallbacks) {
  R3nnModel model(testing::tiny_grammar(), testing::tiny_config());
  const auto data = tiny_data();
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 2;
  std::size_t steps = 0, epochs = 0;
  const auto reports = train(
      model, data, cfg, [&](const EpochReport&) { ++epochs; },
      [&](std::size_t step, double loss) {
        EXPECT_EQ(step, ++steps);
        EXPECT_GE(loss, 0.0);
      });
  ASSERT_EQ(reports.size(), 3u);
  EXPECT_EQ(epochs, 3u);
  // Five instances in batches of two: the last batch of each epoch is short.
  EXPECT_EQ(steps, 9u);
  for (int e = 0; e < 3; ++e) {
    EXPECT_EQ(reports[e].epoch, e + 1);
    EXPECT_EQ(reports[e].steps, 3u);
  }
}

TEST(Train, LossFallsOverEpochs) {
  R3nnModel model(testing::tiny_grammar(), testing::tiny_config());
  TrainConfig cfg;
  cfg.epochs = 30;
  cfg.batch_size = 5;
  cfg.adam.lr = 0.01;
  const auto reports = train(model, tiny_data(), cfg);
  EXPECT_LT(reports.back().mean_loss, 0.8 * reports.front().mean_loss);
}

TEST(Train, DeterministicForASeed) {
  R3nnModel a(testing::tiny_grammar(), testing::tiny_config());
  R3nnModel b(testing::tiny_grammar(), testing::tiny_config());
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 2;
  const auto ra = train(a, tiny_data(), cfg);
  const auto rb = train(b, tiny_data(), cfg);
  EXPECT_EQ(ra.back().mean_loss, rb.back().mean_loss);
  EXPECT_EQ(flat_params(a), flat_params(b));

  R3nnModel c(testing::tiny_grammar(), testing::tiny_config());
  cfg.seed = 2;
  train(c, tiny_data(), cfg);
  EXPECT_NE(flat_params(a), flat_params(c));
}

TEST(Train, EmptyDataAndBadConfig) {
  R3nnModel model(testing::tiny_grammar(), testing::tiny_config());
  const std::vector<double> before = flat_params(model);
  EXPECT_TRUE(train(model, std::vector<TrainingInstance>{}, TrainConfig{}).empty());
  EXPECT_EQ(flat_params(model), before);
  TrainConfig bad;
  bad.batch_size = 0;
  EXPECT_THROW(train(model, tiny_data(), bad), std::invalid_argument);
  bad = TrainConfig{};
  bad.epochs = -1;
  EXPECT_THROW(train(model, tiny_data(), bad), std::invalid_argument);
  bad = TrainConfig{};
  bad.adam.lr = 0.0;
  EXPECT_THROW(train(model, tiny_data(), bad), std::invalid_argument);
}

TEST(FilterTrainable, DropsOversizedAndForeignPrograms) {
  R3nnConfig cfg = testing::tiny_config();
  cfg.max_size = 4;
  const R3nnModel model(testing::tiny_grammar(), cfg);
  std::vector<TrainingInstance> data = tiny_data();
  // Sizes 6 and 7 exceed the bound; GetFirstNumber is not in the tiny grammar.
  data.push_back(tiny_instance("(Concat (GetFirstWord (arg inp)) (ConstStr SPACE) (GetLastWord (arg inp)) inp)",
                               tiny_inputs()));
  TrainingInstance foreign{parse_program("(Concat (GetFirstNumber (arg inp)))"), {{"a 1", "1"}}};
  data.push_back(foreign);
  const std::size_t before = data.size();
  const std::size_t removed = filter_trainable(model, data);
  EXPECT_EQ(removed, 3u);
  EXPECT_EQ(data.size(), before - removed);
  for (const TrainingInstance& inst : data) EXPECT_LE(program_size(inst.program), 4);
}

}  // namespace
}  // namespace dapip
