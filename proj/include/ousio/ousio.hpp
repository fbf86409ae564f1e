#pragma once

#include "config.hpp"
#include "corpus.hpp"
#include "error.hpp"
#include "frameworks.hpp"
#include "hull.hpp"
#include "lexicon.hpp"
#include "linalg.hpp"
#include "ousiogram.hpp"
#include "ousiometer.hpp"
#include "ousionyms.hpp"
#include "render.hpp"
#include "stats.hpp"
#include "text.hpp"
