#pragma once

/// Umbrella header for the whole toolkit. Individual headers are fine to
/// include on their own; cli.hpp is left out because it pulls in CLI11.

#include "vad/annotations.hpp"
#include "vad/config.hpp"
#include "vad/detector.hpp"
#include "vad/evaluation.hpp"
#include "vad/features.hpp"
#include "vad/frame_io.hpp"
#include "vad/geometry.hpp"
#include "vad/image.hpp"
#include "vad/parallel.hpp"
#include "vad/png_io.hpp"
#include "vad/render.hpp"
#include "vad/score_volume.hpp"
#include "vad/synth.hpp"
#include "vad/text.hpp"
