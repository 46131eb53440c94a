#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "alis/core.hpp"
#include "alis/error.hpp"

namespace alis {
namespace {

TEST(Score, ZeroModelIsZero) {
    const auto model = LinearModel::zero(3);
    const std::vector<double> x{1.5, -2.0, 7.0};
    EXPECT_EQ(score(model, x), 0.0);
}

TEST(Score, DotProductPlusBias) {
    const LinearModel model{{1.0, 2.0}, 0.5};
    const std::vector<double> x{1.0, 1.0};
    EXPECT_DOUBLE_EQ(score(model, x), 3.5);
}

TEST(Score, SignFlip) {
    const LinearModel model{{-1.0}, 0.0};
    const std::vector<double> x{2.0};
    EXPECT_DOUBLE_EQ(score(model, x), -2.0);
}

TEST(Score, DimensionMismatchThrows) {
    const LinearModel model{{1.0, 2.0}, 0.0};
    const std::vector<double> x{1.0};
    EXPECT_THROW(score(model, x), InvalidInput);
}

TEST(Loss, Examples) {
    EXPECT_EQ(loss(LossKind::Squared, 1, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(loss(LossKind::Squared, -1, 0.5), 2.25);
    EXPECT_EQ(loss(LossKind::Hinge, 1, 2.0), 0.0);
    EXPECT_DOUBLE_EQ(loss(LossKind::Logistic, 1, 0.0), std::log(2.0));
}

TEST(Loss, LogisticIsStableForLargeMargins) {
    EXPECT_NEAR(loss(LossKind::Logistic, 1, 800.0), 0.0, 1e-300);
    EXPECT_DOUBLE_EQ(loss(LossKind::Logistic, -1, 800.0), 800.0);
}

TEST(Loss, RejectsBadArguments) {
    EXPECT_THROW(loss(LossKind::Squared, 1, std::numeric_limits<double>::quiet_NaN()), InvalidInput);
    EXPECT_THROW(loss(LossKind::Hinge, 1, std::numeric_limits<double>::infinity()), InvalidInput);
    EXPECT_THROW(loss(LossKind::Squared, 0, 1.0), InvalidInput);
}

// Every loss is nonnegative and non-increasing in the margin y*f.
TEST(Loss, NonnegativeAndNonIncreasingInMargin) {
    for (LossKind kind : {LossKind::Squared, LossKind::Logistic, LossKind::Hinge}) {
        for (Label y : {-1, 1}) {
            double prev = std::numeric_limits<double>::infinity();
            for (int i = -400; i <= 400; ++i) {
                const double margin = i / 100.0;
                const double value = loss(kind, y, margin * y);
                EXPECT_GE(value, 0.0);
                if (kind == LossKind::Squared && margin > 1.0) break;  // squared rises again past y*f = 1
                EXPECT_LE(value, prev + 1e-15) << to_string(kind) << " margin " << margin;
                prev = value;
            }
        }
    }
}

TEST(Loss, DerivativeMatchesFiniteDifference) {
    for (LossKind kind : {LossKind::Squared, LossKind::Logistic, LossKind::Hinge}) {
        for (Label y : {-1, 1}) {
            for (double f : {-2.3, -0.4, 0.3, 1.7}) {
                const double h = 1e-6;
                const double fd = (loss(kind, y, f + h) - loss(kind, y, f - h)) / (2 * h);
                EXPECT_NEAR(loss_derivative(kind, y, f), fd, 1e-6) << to_string(kind);
            }
        }
    }
}

TEST(LossKind, RoundTripsThroughNames) {
    for (LossKind kind : {LossKind::Squared, LossKind::Logistic, LossKind::Hinge})
        EXPECT_EQ(parse_loss_kind(to_string(kind)), kind);
    EXPECT_THROW(parse_loss_kind("absolute"), InvalidInput);
}

TEST(Dataset, ValidatesInvariants) {
    EXPECT_NO_THROW(Dataset({1.0, 2.0}, {1, -1}, 1));
    EXPECT_THROW(Dataset({}, {}, 1), InvalidInput);
    EXPECT_THROW(Dataset({1.0}, {1}, 0), InvalidInput);
    EXPECT_THROW(Dataset({1.0, 2.0}, {1}, 1), InvalidInput);
    EXPECT_THROW(Dataset({1.0}, {0}, 1), InvalidInput);
    EXPECT_THROW(Dataset({std::numeric_limits<double>::infinity()}, {1}, 1), InvalidInput);
}

TEST(TrainConfig, Validation) {
    TrainConfig c;
    EXPECT_NO_THROW(c.validate());
    c.gradient_tolerance = 0.0;
    EXPECT_THROW(c.validate(), InvalidInput);
    c = {};
    c.step_size = -1.0;
    EXPECT_THROW(c.validate(), InvalidInput);
    c = {};
    c.l2_regularization = -1e-3;
    EXPECT_THROW(c.validate(), InvalidInput);
    c = {};
    c.l2_regularization = 0.0;
    EXPECT_NO_THROW(c.validate());
}

}  // namespace
}  // namespace alis
