#include "mathlens/exam.hpp"

#include <set>

#include "mathlens/errors.hpp"
#include "mathlens/text.hpp"

namespace mathlens::exam {

ExamFile parse_exam(std::string_view input) {
    ExamFile exam;
    std::string current_id;
    std::string current_prompt;
    std::set<std::string> seen_ids;

    auto flush_question = [&] {
        if (current_id.empty()) return;
        std::string prompt(text::trim(current_prompt));
        if (prompt.empty())
            throw ConfigError("question '" + current_id + "' has an empty prompt");
        if (!seen_ids.insert(current_id).second)
            throw ConfigError("duplicate question id '" + current_id + "'");
        exam.questions.push_back(Question{current_id, std::move(prompt)});
        current_id.clear();
        current_prompt.clear();
    };

    for (const std::string& raw_line : text::split(input, '\n')) {
        std::string_view line = text::trim(raw_line);
        if (line.rfind("## ", 0) == 0) {
            flush_question();
            current_id = std::string(text::trim(line.substr(3)));
            if (current_id.empty()) throw ConfigError("question section with empty id");
            continue;
        }
        if (current_id.empty()) {
            if (line.rfind("exam:", 0) == 0)
                exam.exam_id = std::string(text::trim(line.substr(5)));
            else if (line.rfind("course:", 0) == 0)
                exam.course = std::string(text::trim(line.substr(7)));
            continue;
        }
        current_prompt += raw_line;
        current_prompt += '\n';
    }
    flush_question();

    if (exam.exam_id.empty()) throw ConfigError("exam file is missing an 'exam:' header");
    if (exam.questions.empty()) throw ConfigError("exam file has no questions");
    return exam;
}

ExamFile load_exam(const std::string& path) {
    return parse_exam(text::read_file(path));
}

}  // namespace mathlens::exam
