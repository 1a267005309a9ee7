#pragma once

#include "ucreat/conllu.hpp"
#include "ucreat/corpus.hpp"
#include "ucreat/error.hpp"
#include "ucreat/evaluation.hpp"
#include "ucreat/events.hpp"
#include "ucreat/pipeline.hpp"
#include "ucreat/representations.hpp"
#include "ucreat/retrieval.hpp"
#include "ucreat/version.hpp"
