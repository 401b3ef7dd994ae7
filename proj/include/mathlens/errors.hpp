#pragma once

#include <stdexcept>
#include <string>

namespace mathlens {

// Base for all library errors; callers can catch mathlens::Error or the
// specific subtype named in each operation's contract.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptySolution : Error { using Error::Error; };
struct EmptyPrompt : Error { using Error::Error; };
struct InsufficientCorpus : Error { using Error::Error; };
struct NoTrials : Error { using Error::Error; };
struct NoQuestions : Error { using Error::Error; };
struct OverrideEmpty : Error { using Error::Error; };
struct ReplayMiss : Error { using Error::Error; };
struct EndpointUnreachable : Error { using Error::Error; };
struct Timeout : Error { using Error::Error; };
struct BadConfig : Error { using Error::Error; };
struct EmptyCorpus : Error { using Error::Error; };
struct EmptyIndex : Error { using Error::Error; };
struct ContextOverflow : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

struct HttpError : Error {
    int status;
    HttpError(int status_code, const std::string& what_arg)
        : Error(what_arg), status(status_code) {}
};

}  // namespace mathlens
