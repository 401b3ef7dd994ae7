#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mathlens::exam {

struct Question {
    std::string question_id;
    std::string prompt;
};

// Plain-text exam format instructors can author directly:
//   exam: Calc I/Exam I
//   course: Calc I          (optional)
//   ## q1
//   Find the gradient ...
//   ## q2
//   ...
struct ExamFile {
    std::string exam_id;
    std::string course;
    std::vector<Question> questions;
};

ExamFile parse_exam(std::string_view text);
ExamFile load_exam(const std::string& path);

}  // namespace mathlens::exam
