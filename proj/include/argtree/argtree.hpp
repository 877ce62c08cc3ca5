#ifndef ARGTREE_ARGTREE_HPP
#define ARGTREE_ARGTREE_HPP

#include "argtree/anchor.hpp"
#include "argtree/category_model.hpp"
#include "argtree/corpus.hpp"
#include "argtree/edits.hpp"
#include "argtree/error.hpp"
#include "argtree/eval.hpp"
#include "argtree/function_tagger.hpp"
#include "argtree/json_api.hpp"
#include "argtree/model_archive.hpp"
#include "argtree/phrase_tagger.hpp"
#include "argtree/report.hpp"
#include "argtree/service.hpp"
#include "argtree/synthetic.hpp"
#include "argtree/tagset.hpp"
#include "argtree/tagset_format.hpp"
#include "argtree/tree.hpp"

#endif  // ARGTREE_ARGTREE_HPP
