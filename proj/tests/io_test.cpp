#include "noisydet/io.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "noisydet/error.hpp"

namespace noisydet {
namespace {

std::size_t parse_error_line(const std::string& text, auto reader) {
  std::istringstream in(text);
  try {
    reader(in);
  } catch (const ParseError& e) {
    return e.line();
  }
  ADD_FAILURE() << "no ParseError for:\n" << text;
  return 0;
}

TEST(FormatNumberTest, ShortestRoundTrip) {
  EXPECT_EQ(io::format_number(0.1), "0.1");
  EXPECT_EQ(io::format_number(600), "600");
  EXPECT_EQ(io::format_number(-2.5e-7), "-2.5e-07");
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> any(-1e6, 1e6);
  for (int i = 0; i < 10000; ++i) {
    const double v = any(gen);
    EXPECT_EQ(std::stod(io::format_number(v)), v);
  }
}

TEST(DatasetIoTest, RoundTripIsExact) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> pos(0, 400);
  std::uniform_real_distribution<double> size(1e-3, 150);
  std::vector<Annotation> data;
  for (int i = 0; i < 500; ++i) {
    const double x = pos(gen), y = pos(gen);
    data.push_back({"img" + std::to_string(i / 3), "les" + std::to_string(i % 3), Box(x, y, x + size(gen), y + size(gen)),
                    600, 600, "c" + std::to_string(i / 6)});
  }
  std::ostringstream out;
  io::write_dataset(out, data, {{"seed", "4"}});
  EXPECT_EQ(out.str().rfind("# seed=4\n", 0), 0u);
  std::istringstream in(out.str());
  const auto back = io::read_dataset(in);
  ASSERT_EQ(back.size(), data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    EXPECT_EQ(back[i].image_id, data[i].image_id);
    EXPECT_EQ(back[i].lesion_id, data[i].lesion_id);
    EXPECT_EQ(back[i].box, data[i].box);
    EXPECT_EQ(back[i].image_width, data[i].image_width);
    EXPECT_EQ(back[i].case_id, data[i].case_id);
  }
  std::ostringstream again;
  io::write_dataset(again, back, {{"seed", "4"}});
  EXPECT_EQ(again.str(), out.str());
}

TEST(DatasetIoTest, CaseColumnIsOptionalAndCrlfAccepted) {
  std::istringstream in("image_id,lesion_id,x1,y1,x2,y2,image_width,image_height\r\na,l,1,2,3,4,10,10\r\n");
  const auto data = io::read_dataset(in);
  ASSERT_EQ(data.size(), 1u);
  EXPECT_EQ(data[0].case_id, "");
  EXPECT_EQ(data[0].box, Box(1, 2, 3, 4));
}

TEST(DatasetIoTest, EmptyInput) {
  std::istringstream empty("");
  EXPECT_TRUE(io::read_dataset(empty).empty());
  std::istringstream header_only(std::string(io::kDatasetHeader) + "\n");
  EXPECT_TRUE(io::read_dataset(header_only).empty());
}

TEST(DatasetIoTest, ErrorsCarryLineNumbers) {
  const std::string h = std::string(io::kDatasetHeader) + "\n";
  auto reader = [](std::istream& in) { io::read_dataset(in); };
  EXPECT_EQ(parse_error_line("# comment\n" + h + "a,l,1,2,3,4,10,10,c\na,m,5,2,3,4,10,10,c\n", reader), 4u);
  EXPECT_EQ(parse_error_line(h + "a,l,1,2,x,4,10,10,c\n", reader), 2u);
  EXPECT_EQ(parse_error_line(h + "a,l,1,2,3\n", reader), 2u);
  EXPECT_EQ(parse_error_line(h + "a,l,1,2,30,4,10,10,c\n", reader), 2u);  // outside the image
  EXPECT_EQ(parse_error_line(h + "\na,l,1,2,3,4,10,10,c\na,l,1,nan,3,4,10,10,c\n", reader), 4u);
  EXPECT_EQ(parse_error_line("\n\nimage_id,x1\n", reader), 3u);
  std::istringstream dup(h + "a,l,1,2,3,4,10,10,c\na,l,1,2,3,4,10,10,c\n");
  EXPECT_THROW(io::read_dataset(dup), ValidationError);
}

TEST(DetectionIoTest, RoundTripAndErrors) {
  const std::vector<Detection> dets{{"a", Box(0.25, 1, 2, 3.125), 0.9}, {"b", Box(1, 1, 7, 7), -3.5e-9}};
  std::ostringstream out;
  io::write_detections(out, dets);
  std::istringstream in(out.str());
  const auto back = io::read_detections(in);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].box, dets[0].box);
  EXPECT_EQ(back[1].score, dets[1].score);
  auto reader = [](std::istream& s) { io::read_detections(s); };
  EXPECT_EQ(parse_error_line(std::string(io::kDetectionHeader) + "\na,0,0,1,1,inf\n", reader), 2u);
  EXPECT_EQ(parse_error_line(std::string(io::kDetectionHeader) + "\na,0,0,1,1,0.5\na,3,0,1,1,0.5\n", reader), 3u);
  const std::vector<Detection> bad{{"a,b", Box(0, 0, 1, 1), 0.5}};
  std::ostringstream sink;
  EXPECT_THROW(io::write_detections(sink, bad), ValidationError);
}

TEST(ProposalIoTest, RoundTripAndErrors) {
  const std::vector<io::Proposal> props{{"a", ScoredProposal::make(Box(0, 0, 5, 5), 1, 0.3)},
                                        {"a", ScoredProposal::make(Box(1, 0, 5, 5), 0, 0.0)}};
  std::ostringstream out;
  io::write_proposals(out, props);
  std::istringstream in(out.str());
  const auto back = io::read_proposals(in);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].proposal.mining_score, props[0].proposal.mining_score);
  EXPECT_EQ(back[1].proposal.true_label, 0);
  auto reader = [](std::istream& s) { io::read_proposals(s); };
  EXPECT_EQ(parse_error_line(std::string(io::kProposalHeader) + "\na,0,0,1,1,1,1.5\n", reader), 2u);
  EXPECT_EQ(parse_error_line(std::string(io::kProposalHeader) + "\na,0,0,1,1,2,0.5\n", reader), 2u);
}

TEST(CensusIoTest, RoundTrip) {
  std::vector<CensusRow> rows(2);
  rows[0] = {"iou", "clean", 4.25, 17, 4};
  rows[1] = {"exp_iou", "mu3", 1.0 / 3.0, 1, 3};
  std::ostringstream out;
  io::write_census(out, rows);
  std::istringstream in(out.str());
  const auto back = io::read_census(in);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].criterion, "exp_iou");
  EXPECT_EQ(back[1].level, "mu3");
  EXPECT_EQ(back[1].positives_per_lesion, 1.0 / 3.0);
}

}  // namespace
}  // namespace noisydet
