#pragma once

#include <filesystem>

#include "teamtrack/metrics.hpp"
#include "teamtrack/pipeline.hpp"

namespace teamtrack {

// track.jsonl: one object per frame per player:
//   {"frame","player","team","status","bbox","confidence","ms"}
// bbox is null while the player is lost or off screen; ms repeats the frame's
// wall-clock time on every row of that frame.
void save_track_log(const TrackLog& log, const std::filesystem::path& path);

// events.jsonl: {"frame","player","kind","detail"} per event.
void save_events(const std::vector<PipelineEvent>& events, const std::filesystem::path& path);

// Loads both files back into a TrackLog (scenario/config metadata not stored).
TrackLog load_track_log(const std::filesystem::path& track_path,
                        const std::filesystem::path& events_path);

void save_report(const EvalReport& report, const std::filesystem::path& path);

}  // namespace teamtrack
