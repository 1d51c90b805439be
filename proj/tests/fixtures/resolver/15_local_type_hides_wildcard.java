package fixtures.samename;

import com.google.gson.*;

public class SameName {
    static class JsonObject {
        void add(String k, String v) {
        }
    }

    public void fill() {
        JsonObject local = new JsonObject();
        local.add("k", "v");
        JsonArray array = new JsonArray(); //@use com.google.gson.JsonArray.<init>/0
        array.add("v"); //@use com.google.gson.JsonArray.add/1
    }
}
