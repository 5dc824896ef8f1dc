/* document helpers */
#include "editor.h"

static int counter;

static void save(Tbfin *bfwin, GtkWidget *widget)
{
	GList *tmplist = list(bfwin->documentlist);
	while (tmplist) {
		Tdocument *tmpdoc = (Tdocument *) tmplist->data;
		if (tmpdoc->modified != false) {
			doc(tmpdoc, false, false, file);
		}
		tmplist = list(tmplist);
	}
	save(tmplist, tmpdoc, false, cb);
}
