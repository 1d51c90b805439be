package fixtures.typeargs;

import java.util.Collections;
import com.google.gson.JsonArray;

public class TypeArgs {
    public int check(JsonArray array) {
        java.util.List<String> none = Collections.<String>emptyList();
        return array.size() + none.size(); //@use com.google.gson.JsonArray.size/0
    }
}
